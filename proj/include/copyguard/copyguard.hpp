#pragma once

// Umbrella header for the copyguard library.

#include "copyguard/anchor_ranking.hpp"
#include "copyguard/backend.hpp"
#include "copyguard/character_kb.hpp"
#include "copyguard/common.hpp"
#include "copyguard/corpus_index.hpp"
#include "copyguard/embedding.hpp"
#include "copyguard/evaluation.hpp"
#include "copyguard/experiment.hpp"
#include "copyguard/gateway.hpp"
#include "copyguard/http_clients.hpp"
#include "copyguard/intent_detection.hpp"
#include "copyguard/lexicon_embedder.hpp"
#include "copyguard/mitigation.hpp"
#include "copyguard/mock_services.hpp"
#include "copyguard/prompts.hpp"
#include "copyguard/report.hpp"
#include "copyguard/services.hpp"
#include "copyguard/text.hpp"
