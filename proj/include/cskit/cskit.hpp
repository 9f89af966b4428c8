#pragma once

// Umbrella header. mt_http.hpp is left out so the core stays free of the
// HTTP/JSON dependencies; include it directly where a live endpoint is used.

#include "cskit/augment.hpp"
#include "cskit/corpus.hpp"
#include "cskit/crf.hpp"
#include "cskit/embedding.hpp"
#include "cskit/eval.hpp"
#include "cskit/kmeans.hpp"
#include "cskit/naive_bayes.hpp"
#include "cskit/seglid.hpp"
#include "cskit/textproc.hpp"
