#pragma once

#include "virial/checks.hpp"
#include "virial/config_algebra.hpp"
#include "virial/counting.hpp"
#include "virial/error.hpp"
#include "virial/exact.hpp"
#include "virial/graph.hpp"
#include "virial/io.hpp"
#include "virial/kernel.hpp"
#include "virial/numerics.hpp"
#include "virial/oracle.hpp"
#include "virial/parallel.hpp"
#include "virial/potential.hpp"
#include "virial/quadrature.hpp"
#include "virial/series.hpp"
