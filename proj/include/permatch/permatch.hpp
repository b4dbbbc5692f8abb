#pragma once

#include "permatch/error.hpp"
#include "permatch/exact.hpp"
#include "permatch/graph.hpp"
#include "permatch/graph_io.hpp"
#include "permatch/parallel.hpp"
#include "permatch/permanent.hpp"
#include "permatch/counting.hpp"
#include "permatch/injection.hpp"
#include "permatch/random_models.hpp"
#include "permatch/verify.hpp"
