#pragma once

#include "dpower/errors.hpp"
#include "dpower/io.hpp"
#include "dpower/numerics.hpp"
#include "dpower/power_lattice.hpp"
#include "dpower/rational.hpp"
#include "dpower/report.hpp"
#include "dpower/root_data.hpp"
#include "dpower/subgroup_a1.hpp"
#include "dpower/weyl_tau.hpp"
