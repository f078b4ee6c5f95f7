#pragma once

#include <filesystem>
#include <string>

#include "awa/trace.hpp"

namespace awa {

/// Corpus directory layout: one file per class named class_<idx>.txt for idx
/// in [0, K). Each file starts with a header line `format: ds` or
/// `format: bs`, followed by one trace per line as whitespace-separated
/// signed numbers. ds lines hold +1/-1 packet directions; bs lines hold
/// signed burst sizes with alternating signs.

/// Loads a corpus directory, converting every trace to the fixed-length
/// encoding of `trace_length` bursts.
TraceCorpus load_corpus(const std::filesystem::path& dir, int trace_length);

/// Writes a corpus as burst-sequence files (only the non-padding prefix of
/// each trace is emitted). Creates `dir` if needed.
void save_corpus(const TraceCorpus& corpus, const std::filesystem::path& dir);

/// Parses one trace line in the given format ("ds" or "bs") into a fixed
/// trace of `trace_length`.
FixedTrace parse_trace_line(const std::string& line, const std::string& format, int trace_length);

} // namespace awa
