#pragma once

#include "sgof/complex.hpp"
#include "sgof/experiments.hpp"
#include "sgof/inference.hpp"
#include "sgof/io.hpp"
#include "sgof/models.hpp"
#include "sgof/moments.hpp"
#include "sgof/morse.hpp"
#include "sgof/numeric.hpp"
#include "sgof/rng.hpp"
#include "sgof/subcomplex.hpp"
