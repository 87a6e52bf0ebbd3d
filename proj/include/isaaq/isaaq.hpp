/**
 * @file isaaq.hpp
 * @brief Umbrella header.
 */

#pragma once

#include "isaaq/baseline.hpp"
#include "isaaq/circuit.hpp"
#include "isaaq/coeff_model.hpp"
#include "isaaq/device.hpp"
#include "isaaq/error.hpp"
#include "isaaq/gf2.hpp"
#include "isaaq/partition.hpp"
#include "isaaq/pipeline.hpp"
#include "isaaq/qasm.hpp"
#include "isaaq/qubo.hpp"
#include "isaaq/remote_solver.hpp"
#include "isaaq/scheduler.hpp"
#include "isaaq/solver.hpp"
#include "isaaq/solver_pool.hpp"
#include "isaaq/synthesis.hpp"
#include "isaaq/token_swap.hpp"
#include "isaaq/verify.hpp"
