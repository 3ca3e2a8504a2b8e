#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "songtuple/dataset.hpp"
#include "songtuple/midi_extract.hpp"
#include "songtuple/song_model.hpp"

namespace songtuple {

using nlohmann::json;

/// {"kind": "paired", "language": "en", "lines": [[{"word": "love", "notes": [["C4", 169, 0]]}]]}
json entry_to_json(const SongEntry& entry);
/// Throws InvalidEntry on schema errors or when the result fails validation.
SongEntry entry_from_json(const json& j);

json triplets_to_json(std::span<const MelodyTriplet> triplets);
std::vector<MelodyTriplet> triplets_from_json(const json& j);

/// A corpus record holds one song as {"text": tuple text}, {"triplets": [...]}
/// or an entry object with "lines". An explicit "language" overrides inference.
SongEntry entry_from_record(const json& record);

json report_to_json(const ExtractionReport& report);
json stats_to_json(const CorpusStatsReport& report);
json histograms_to_json(const AttributeHistograms& h);

/// {"label", "onset", "offset"}.
TimedInterval interval_from_json(const json& j);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

struct JsonLine {
    std::size_t line_number = 0;
    json value;
};

/// Non-blank lines parsed as JSON. Throws IoError naming the bad line.
std::vector<JsonLine> parse_jsonl(std::string_view text);

}  // namespace songtuple
