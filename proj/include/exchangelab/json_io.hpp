#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "exchangelab/bernoullicity.hpp"
#include "exchangelab/core.hpp"
#include "exchangelab/definetti.hpp"
#include "exchangelab/exchange.hpp"
#include "exchangelab/measures.hpp"

namespace exchangelab {

using Json = nlohmann::json;

// Measure spec schema: {"type":"bernoulli","pi":[...]},
// {"type":"mixture","components":[{"w":...,"pi":[...]}, ...]},
// {"type":"markov","Pi":[[...],...],"p":[...](optional)},
// {"type":"dpp-sine","a":...}, {"type":"dpp-toeplitz","c":[...]}.
// Rational entries are strings like "1/2" (parsed exactly); bare numbers
// are read as doubles. Errors name the offending field.
ProcessMeasure measure_from_json(const Json& j);
Json measure_to_json(const ProcessMeasure& mu);
ProcessMeasure load_measure_file(const std::string& path);

Json prob_to_json(const Prob& p);
Prob prob_from_json(const Json& j);

Json constraints_to_json(const Constraints& cs);
Constraints constraints_from_json(const Json& j);

Json validation_to_json(const ValidationReport& rep);
ValidationReport validation_from_json(const Json& j);

Json exchange_report_to_json(const ExchangeReport& rep);
ExchangeReport exchange_report_from_json(const Json& j);

Json rn_table_to_json(const RnRatioTable& table);
RnRatioTable rn_table_from_json(const Json& j);

Json witness_to_json(const QuasiWitness& w);
QuasiWitness witness_from_json(const Json& j);

Json symmetrize_to_json(const SymmetrizeTable& table);
SymmetrizeTable symmetrize_from_json(const Json& j);

Json independence_to_json(const IndependenceGapReport& rep);
IndependenceGapReport independence_from_json(const Json& j);

Json ergodic_to_json(const ErgodicAverageReport& rep);
ErgodicAverageReport ergodic_from_json(const Json& j);

Json moments_to_json(const MomentSequence& m);
MomentSequence moments_from_json(const Json& j);

Json hankel_to_json(const HankelReport& rep);
HankelReport hankel_from_json(const Json& j);

Json atoms_to_json(const AtomicMixingMeasure& m);
AtomicMixingMeasure atoms_from_json(const Json& j);

}  // namespace exchangelab
