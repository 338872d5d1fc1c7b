#pragma once

#include "wavescale/error.hpp"
#include "wavescale/rng.hpp"
#include "wavescale/wavelet.hpp"
#include "wavescale/mono_spectrum.hpp"
#include "wavescale/multi_spectrum.hpp"
#include "wavescale/synth.hpp"
#include "wavescale/descriptors.hpp"
#include "wavescale/stats.hpp"
#include "wavescale/parallel.hpp"
#include "wavescale/classify/models.hpp"
#include "wavescale/classify/pca.hpp"
#include "wavescale/classify/validation.hpp"
#include "wavescale/classify/search.hpp"
#include "wavescale/classify/curves.hpp"
#include "wavescale/pipeline/config.hpp"
#include "wavescale/pipeline/table_io.hpp"
#include "wavescale/pipeline/preprocess.hpp"
#include "wavescale/pipeline/experiment.hpp"
