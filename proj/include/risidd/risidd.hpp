// Convenience umbrella pulling in the whole library.
#pragma once

#include "risidd/channel.hpp"
#include "risidd/common.hpp"
#include "risidd/config.hpp"
#include "risidd/deployment.hpp"
#include "risidd/detector.hpp"
#include "risidd/harness.hpp"
#include "risidd/idd.hpp"
#include "risidd/ldpc.hpp"
#include "risidd/ris_design.hpp"
#include "risidd/rng.hpp"
#include "risidd/selftest.hpp"
