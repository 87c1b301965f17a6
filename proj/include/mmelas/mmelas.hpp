#pragma once

// Umbrella header.

#include "mmelas/audit.hpp"
#include "mmelas/config.hpp"
#include "mmelas/constraint.hpp"
#include "mmelas/dump.hpp"
#include "mmelas/energy.hpp"
#include "mmelas/fourier.hpp"
#include "mmelas/gradcheck.hpp"
#include "mmelas/grid.hpp"
#include "mmelas/ledger.hpp"
#include "mmelas/random.hpp"
#include "mmelas/run.hpp"
#include "mmelas/solver.hpp"
#include "mmelas/stepper.hpp"
#include "mmelas/tensor.hpp"
