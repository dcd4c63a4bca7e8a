// Copyright 2026 The dopplerspread Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "doppler/bessel.hpp"
#include "doppler/channel.hpp"
#include "doppler/constellation.hpp"
#include "doppler/error.hpp"
#include "doppler/harness.hpp"
#include "doppler/io.hpp"
#include "doppler/likelihood.hpp"
#include "doppler/mbe.hpp"
#include "doppler/moments.hpp"
#include "doppler/rng.hpp"
#include "doppler/search.hpp"
