// Copyright (C) 2026 the seld-edge authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

// Umbrella header for the seld-edge toolkit.

#include "seldedge/accdoa.hpp"
#include "seldedge/audio.hpp"
#include "seldedge/common.hpp"
#include "seldedge/csv.hpp"
#include "seldedge/feature_tensor.hpp"
#include "seldedge/fft.hpp"
#include "seldedge/mel.hpp"
#include "seldedge/metrics.hpp"
#include "seldedge/nn/complexity.hpp"
#include "seldedge/nn/forward.hpp"
#include "seldedge/nn/spec.hpp"
#include "seldedge/nn/stub.hpp"
#include "seldedge/nn/weights.hpp"
#include "seldedge/pipeline.hpp"
#include "seldedge/rir.hpp"
#include "seldedge/rng.hpp"
#include "seldedge/salsa.hpp"
#include "seldedge/scene.hpp"
#include "seldedge/sources.hpp"
#include "seldedge/stft.hpp"
#include "seldedge/synth.hpp"
#include "seldedge/tune.hpp"
#include "seldedge/wav.hpp"
