#pragma once

#include "approxh/assembly.hpp"
#include "approxh/config.hpp"
#include "approxh/errors.hpp"
#include "approxh/flatgen.hpp"
#include "approxh/frames.hpp"
#include "approxh/hadamard.hpp"
#include "approxh/io.hpp"
#include "approxh/numtheory.hpp"
#include "approxh/rng.hpp"
#include "approxh/sign_matrix.hpp"
#include "approxh/spectral.hpp"
