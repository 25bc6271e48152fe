#pragma once

// Streaming Shannon-entropy estimators with constant-word memory accounting,
// exact small-instance oracles, and a seeded Monte Carlo harness.

#include "entrostream/general.hpp"
#include "entrostream/harness.hpp"
#include "entrostream/numeric.hpp"
#include "entrostream/oracles.hpp"
#include "entrostream/pmf.hpp"
#include "entrostream/registers.hpp"
#include "entrostream/result.hpp"
#include "entrostream/rng.hpp"
#include "entrostream/simple.hpp"
#include "entrostream/stream.hpp"
#include "entrostream/two_interval.hpp"
