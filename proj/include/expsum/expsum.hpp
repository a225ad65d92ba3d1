#pragma once

#include "expsum/characters.hpp"
#include "expsum/dft.hpp"
#include "expsum/equidist.hpp"
#include "expsum/errors.hpp"
#include "expsum/ffield.hpp"
#include "expsum/haar.hpp"
#include "expsum/io.hpp"
#include "expsum/kernels.hpp"
#include "expsum/mellin.hpp"
#include "expsum/ramification.hpp"
#include "expsum/summation.hpp"
#include "expsum/trace.hpp"
