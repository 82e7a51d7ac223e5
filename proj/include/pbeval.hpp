#pragma once

#include "pbeval/analysis.hpp"
#include "pbeval/completion.hpp"
#include "pbeval/district_example.hpp"
#include "pbeval/greedy.hpp"
#include "pbeval/mes.hpp"
#include "pbeval/metrics.hpp"
#include "pbeval/model.hpp"
#include "pbeval/money.hpp"
#include "pbeval/pabulib.hpp"
#include "pbeval/report.hpp"
#include "pbeval/rules.hpp"
#include "pbeval/serialize.hpp"
#include "pbeval/stats.hpp"
#include "pbeval/tiebreak.hpp"
#include "pbeval/trace.hpp"
