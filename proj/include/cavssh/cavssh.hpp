#pragma once

#include "cavssh/biphoton.hpp"
#include "cavssh/cavity.hpp"
#include "cavssh/csv.hpp"
#include "cavssh/dressing.hpp"
#include "cavssh/errors.hpp"
#include "cavssh/grid.hpp"
#include "cavssh/keldysh.hpp"
#include "cavssh/kerr.hpp"
#include "cavssh/numerics/newton.hpp"
#include "cavssh/numerics/polyfit.hpp"
#include "cavssh/numerics/quadrature.hpp"
#include "cavssh/numerics/svd.hpp"
#include "cavssh/parallel.hpp"
#include "cavssh/ssh.hpp"
#include "cavssh/vertex.hpp"

#define CAVSSH_VERSION "0.1.0"
