// Umbrella header for the delta-shock solver suite.
#ifndef SDW_SDW_HPP
#define SDW_SDW_HPP

#include "sdw/conservation.hpp"
#include "sdw/entropy.hpp"
#include "sdw/errors.hpp"
#include "sdw/fronts.hpp"
#include "sdw/gvp.hpp"
#include "sdw/model.hpp"
#include "sdw/numerics.hpp"
#include "sdw/riemann.hpp"
#include "sdw/scenario.hpp"
#include "sdw/twophase.hpp"

#endif  // SDW_SDW_HPP
