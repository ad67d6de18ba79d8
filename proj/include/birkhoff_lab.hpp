#pragma once

#include "birkhoff_lab/birkhoff.hpp"
#include "birkhoff_lab/circle_core.hpp"
#include "birkhoff_lab/dimension.hpp"
#include "birkhoff_lab/function_zoo.hpp"
#include "birkhoff_lab/stochastic.hpp"
#include "birkhoff_lab/tower_partition.hpp"
