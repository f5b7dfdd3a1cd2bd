#pragma once

#include "errors.hpp"
#include "int_matrix.hpp"
#include "exact_lattice.hpp"
#include "zp_action.hpp"
#include "normal_form.hpp"
#include "sym_scalar.hpp"
#include "trig_affine_map.hpp"
#include "analytic_action.hpp"
#include "freeness.hpp"
#include "json_io.hpp"
