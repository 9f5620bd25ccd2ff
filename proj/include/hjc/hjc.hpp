#pragma once

#include "hjc/error.hpp"
#include "hjc/numerics.hpp"
#include "hjc/model.hpp"
#include "hjc/hamiltonian.hpp"
#include "hjc/viscous.hpp"
#include "hjc/limit.hpp"
#include "hjc/trajectories.hpp"
#include "hjc/diagnostics.hpp"
#include "hjc/config.hpp"
#include "hjc/io.hpp"
