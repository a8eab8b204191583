// Umbrella header

#pragma once

#include "qep/basis.hpp"
#include "qep/config_io.hpp"
#include "qep/constants.hpp"
#include "qep/core_model.hpp"
#include "qep/errors.hpp"
#include "qep/experiments.hpp"
#include "qep/hamiltonian.hpp"
#include "qep/oracle.hpp"
#include "qep/output.hpp"
#include "qep/perturbation.hpp"
#include "qep/thermal.hpp"
