#pragma once

// N-soliton closed forms of the (2+1)-dimensional Heisenberg ferromagnetic
// spin chain equation, with independent finite-difference, zero-curvature
// and split-step verification oracles.

#include "hfsc/config.hpp"
#include "hfsc/errors.hpp"
#include "hfsc/fft.hpp"
#include "hfsc/io.hpp"
#include "hfsc/linsolve.hpp"
#include "hfsc/model.hpp"
#include "hfsc/nlsprop.hpp"
#include "hfsc/soliton.hpp"
#include "hfsc/verify.hpp"
#include "hfsc/version.hpp"
