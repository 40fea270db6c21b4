#pragma once

#include "qutrit/analysis.hpp"
#include "qutrit/bessel.hpp"
#include "qutrit/config.hpp"
#include "qutrit/core.hpp"
#include "qutrit/csv.hpp"
#include "qutrit/floquet.hpp"
#include "qutrit/grating.hpp"
#include "qutrit/grid.hpp"
#include "qutrit/gvv.hpp"
#include "qutrit/lindblad.hpp"
#include "qutrit/sweep.hpp"
#include "qutrit/symmetric_eigen.hpp"
