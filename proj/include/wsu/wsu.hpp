#ifndef WSU_WSU_HPP
#define WSU_WSU_HPP

#include "wsu/errors.hpp"
#include "wsu/core.hpp"
#include "wsu/transform.hpp"
#include "wsu/solver.hpp"
#include "wsu/diagnostics.hpp"
#include "wsu/scenarios.hpp"
#include "wsu/config.hpp"
#include "wsu/csv.hpp"

#endif  // WSU_WSU_HPP
