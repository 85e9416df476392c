#pragma once

#include "nsbox/behavior.hpp"
#include "nsbox/bloch.hpp"
#include "nsbox/circuits.hpp"
#include "nsbox/errors.hpp"
#include "nsbox/linalg.hpp"
#include "nsbox/measurement.hpp"
#include "nsbox/noise.hpp"
#include "nsbox/prbases.hpp"
#include "nsbox/rng.hpp"
#include "nsbox/sampling.hpp"
