#pragma once

#include "czl/calibration.hpp"
#include "czl/checks.hpp"
#include "czl/cone_model.hpp"
#include "czl/core.hpp"
#include "czl/fe.hpp"
#include "czl/quadrature.hpp"
#include "czl/report.hpp"
#include "czl/sign_character.hpp"
#include "czl/special_functions.hpp"
#include "czl/suite.hpp"
#include "czl/test_function.hpp"
#include "czl/zeta_engine.hpp"
