#pragma once

// Smoothed separable NMF: vertex extraction under the assumption that
// several data points lie near each vertex of the latent simplex, plus the
// supporting pipeline (NNLS abundances, MRSA, synthetic benchmarks, HSI
// file handling).

#include "ssnmf/bench.hpp"
#include "ssnmf/datagen.hpp"
#include "ssnmf/error.hpp"
#include "ssnmf/extract.hpp"
#include "ssnmf/io.hpp"
#include "ssnmf/linalg.hpp"
#include "ssnmf/metrics.hpp"
#include "ssnmf/nnls.hpp"
#include "ssnmf/rng.hpp"
#include "ssnmf/select.hpp"
#include "ssnmf/types.hpp"
