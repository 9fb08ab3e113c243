#ifndef SMNOMA_SMNOMA_HPP
#define SMNOMA_SMNOMA_HPP

#include "smnoma/baseline.hpp"
#include "smnoma/channel.hpp"
#include "smnoma/config.hpp"
#include "smnoma/detect.hpp"
#include "smnoma/harness.hpp"
#include "smnoma/math.hpp"
#include "smnoma/modem.hpp"
#include "smnoma/pairing.hpp"
#include "smnoma/parallel.hpp"
#include "smnoma/rates.hpp"
#include "smnoma/rng.hpp"

#endif  // SMNOMA_SMNOMA_HPP
