#pragma once

#include "flagframe/errors.hpp"
#include "flagframe/exact.hpp"
#include "flagframe/algebra.hpp"
#include "flagframe/subspace.hpp"
#include "flagframe/constructors.hpp"
#include "flagframe/octonion.hpp"
#include "flagframe/structure.hpp"
#include "flagframe/normalization.hpp"
#include "flagframe/numeric.hpp"
#include "flagframe/frames.hpp"
#include "flagframe/duality.hpp"
#include "flagframe/expr.hpp"
#include "flagframe/ode.hpp"
#include "flagframe/json_io.hpp"
