#pragma once

// Convenience umbrella: the whole library in one include.

#include "autopkg/candidate.hpp"
#include "autopkg/chat.hpp"
#include "autopkg/config.hpp"
#include "autopkg/core.hpp"
#include "autopkg/embedding.hpp"
#include "autopkg/error.hpp"
#include "autopkg/graph.hpp"
#include "autopkg/kgd.hpp"
#include "autopkg/listing.hpp"
#include "autopkg/manifest.hpp"
#include "autopkg/metrics.hpp"
#include "autopkg/parsers.hpp"
#include "autopkg/pipeline.hpp"
#include "autopkg/prompts.hpp"
#include "autopkg/retrieval.hpp"
#include "autopkg/sha256.hpp"
#include "autopkg/synthetic.hpp"
