#pragma once

// Every explicit construction: plateau and Holder cusp functions, Rademacher
// steps and their smoothing, the non-coboundary bumps, trigonometric transfer
// and the Hilbert-transform example.

#include "birkhoff_lab/analytic.hpp"
#include "birkhoff_lab/zoo_holder.hpp"
#include "birkhoff_lab/zoo_noncoboundary.hpp"
#include "birkhoff_lab/zoo_plateau.hpp"
#include "birkhoff_lab/zoo_rademacher.hpp"
