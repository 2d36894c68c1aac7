#pragma once

#include "rank1part/bench.hpp"
#include "rank1part/errors.hpp"
#include "rank1part/eval.hpp"
#include "rank1part/extract.hpp"
#include "rank1part/lbm.hpp"
#include "rank1part/matrix.hpp"
#include "rank1part/potts.hpp"
#include "rank1part/rng.hpp"
