#pragma once

// Umbrella header pulling in the whole toolkit.
#include "seisfacies/attributes.hpp"
#include "seisfacies/bench.hpp"
#include "seisfacies/errors.hpp"
#include "seisfacies/geometry.hpp"
#include "seisfacies/kmeans.hpp"
#include "seisfacies/labels.hpp"
#include "seisfacies/parallel.hpp"
#include "seisfacies/pipeline.hpp"
#include "seisfacies/segy.hpp"
#include "seisfacies/store.hpp"
