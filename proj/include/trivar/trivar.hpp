#pragma once

#include "trivar/types.hpp"
#include "trivar/fft.hpp"
#include "trivar/analytic.hpp"
#include "trivar/ellipse.hpp"
#include "trivar/moments.hpp"
#include "trivar/spectrum.hpp"
#include "trivar/synth.hpp"
#include "trivar/io.hpp"
#include "trivar/pipeline.hpp"
