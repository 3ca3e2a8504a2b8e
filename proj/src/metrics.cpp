#include "songtuple/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "songtuple/errors.hpp"
#include "songtuple/utf8.hpp"

namespace songtuple {

namespace {

double mean_pitch(std::span<const MelodyTriplet> melody) {
    double sum = 0.0;
    for (const auto& t : melody) sum += t.pitch;
    return sum / static_cast<double>(melody.size());
}

double mean_note_duration(std::span<const MelodyTriplet> melody) {
    double sum = 0.0;
    for (const auto& t : melody) sum += t.note_duration;
    return sum / static_cast<double>(melody.size());
}

}  // namespace

std::vector<GridNote> quantize_to_grid(std::span<const MelodyTriplet> melody) {
    std::vector<GridNote> grid;
    grid.reserve(melody.size());
    for (const auto& t : melody) {
        const auto note = static_cast<int>(std::llround(t.note_duration * kGridUnitsPerSecond));
        const auto rest = static_cast<int>(std::llround(t.rest_duration * kGridUnitsPerSecond));
        grid.push_back({t.pitch, std::max(1, note), std::max(0, rest)});
    }
    return grid;
}

CalibratedPair calibrate(const MelodyEvalPair& pair) {
    if (pair.generated.empty() || pair.reference.empty()) throw EmptyInput("calibration needs two non-empty melodies");
    const double gen_duration = mean_note_duration(pair.generated);
    const double ref_duration = mean_note_duration(pair.reference);
    if (!(gen_duration > 0.0) || !(ref_duration > 0.0)) throw EmptyInput("melody has no positive note duration");

    CalibratedPair out;
    // Half-up rounding keeps a second calibration pass at offset 0.
    out.pitch_offset = static_cast<int>(std::floor(mean_pitch(pair.reference) - mean_pitch(pair.generated) + 0.5));
    out.time_ratio = ref_duration / gen_duration;

    out.reference = pair.reference;
    out.generated.reserve(pair.generated.size());
    for (const auto& t : pair.generated) {
        out.generated.push_back(
            {t.pitch + out.pitch_offset, t.note_duration * out.time_ratio, t.rest_duration * out.time_ratio});
    }
    out.generated_grid = quantize_to_grid(out.generated);
    out.reference_grid = quantize_to_grid(out.reference);
    return out;
}

double distribution_similarity(std::span<const int> a, std::span<const int> b) {
    if (a.empty() || b.empty()) throw EmptyInput("distribution similarity needs non-empty lists");
    std::map<int, std::pair<std::size_t, std::size_t>> counts;
    for (int v : a) ++counts[v].first;
    for (int v : b) ++counts[v].second;
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    double shared = 0.0;
    for (const auto& [value, c] : counts) shared += std::min(c.first / na, c.second / nb);
    return std::clamp(100.0 * shared, 0.0, 100.0);
}

double pitch_distribution_similarity(const CalibratedPair& pair) {
    std::vector<int> gen, ref;
    for (const auto& n : pair.generated_grid) gen.push_back(n.pitch);
    for (const auto& n : pair.reference_grid) ref.push_back(n.pitch);
    return distribution_similarity(gen, ref);
}

double duration_distribution_similarity(const CalibratedPair& pair) {
    std::vector<int> gen, ref;
    for (const auto& n : pair.generated_grid) gen.push_back(n.note_units);
    for (const auto& n : pair.reference_grid) ref.push_back(n.note_units);
    return distribution_similarity(gen, ref);
}

double dtw_mean_abs(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    if (a.size() == 0 || b.size() == 0) throw EmptyInput("DTW needs non-empty series");
    const Eigen::Index n = a.size();
    const Eigen::Index m = b.size();
    Eigen::MatrixXd cost(n, m);
    Eigen::MatrixXi steps(n, m);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            const double local = std::abs(a(i) - b(j));
            if (i == 0 && j == 0) {
                cost(i, j) = local;
                steps(i, j) = 1;
                continue;
            }
            // predecessor preference: diagonal, then (i-1, j), then (i, j-1)
            double best = std::numeric_limits<double>::infinity();
            int len = 0;
            if (i > 0 && j > 0) best = cost(i - 1, j - 1), len = steps(i - 1, j - 1);
            if (i > 0 && cost(i - 1, j) < best) best = cost(i - 1, j), len = steps(i - 1, j);
            if (j > 0 && cost(i, j - 1) < best) best = cost(i, j - 1), len = steps(i, j - 1);
            cost(i, j) = local + best;
            steps(i, j) = len + 1;
        }
    }
    return cost(n - 1, m - 1) / steps(n - 1, m - 1);
}

Eigen::VectorXd pitch_series(std::span<const GridNote> melody) {
    const int total = std::accumulate(melody.begin(), melody.end(), 0,
                                      [](int acc, const GridNote& n) { return acc + n.note_units; });
    Eigen::VectorXd series(total);
    Eigen::Index at = 0;
    for (const auto& n : melody) {
        series.segment(at, n.note_units).setConstant(n.pitch);
        at += n.note_units;
    }
    return series;
}

double melody_distance(const CalibratedPair& pair) {
    Eigen::VectorXd gen = pitch_series(pair.generated_grid);
    Eigen::VectorXd ref = pitch_series(pair.reference_grid);
    if (gen.size() == 0 || ref.size() == 0) throw EmptyInput("melody distance needs non-empty melodies");
    gen.array() -= gen.mean();
    ref.array() -= ref.mean();
    return dtw_mean_abs(gen, ref);
}

namespace {

std::vector<std::string> rouge_tokens(std::string_view text, Language language) {
    std::vector<std::string> tokens;
    if (language == Language::Chinese) {
        std::size_t pos = 0;
        while (pos < text.size()) {
            const std::size_t start = pos;
            auto cp = utf8::decode(text, pos);
            if (!cp) {
                ++pos;
                continue;
            }
            if (!utf8::is_space(*cp)) tokens.emplace_back(text.substr(start, pos - start));
        }
        return tokens;
    }
    std::istringstream in{std::string(text)};
    for (std::string word; in >> word;) {
        std::transform(word.begin(), word.end(), word.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        tokens.push_back(std::move(word));
    }
    return tokens;
}

std::map<std::pair<std::string, std::string>, int> bigrams(const std::vector<std::string>& tokens) {
    std::map<std::pair<std::string, std::string>, int> out;
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) ++out[{tokens[i], tokens[i + 1]}];
    return out;
}

}  // namespace

double rouge2(std::string_view candidate, std::string_view reference, Language language) {
    const auto cand = rouge_tokens(candidate, language);
    const auto ref = rouge_tokens(reference, language);
    if (cand.size() < 2 || ref.size() < 2) return 0.0;
    const auto cand_grams = bigrams(cand);
    const auto ref_grams = bigrams(ref);
    int overlap = 0;
    for (const auto& [gram, count] : cand_grams) {
        if (auto it = ref_grams.find(gram); it != ref_grams.end()) overlap += std::min(count, it->second);
    }
    if (overlap == 0) return 0.0;
    const double precision = overlap / static_cast<double>(cand.size() - 1);
    const double recall = overlap / static_cast<double>(ref.size() - 1);
    return 2.0 * precision * recall / (precision + recall);
}

double cosine_similarity(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
    if (u.size() != v.size() || u.size() == 0) {
        throw DimensionMismatch("embedding sizes " + std::to_string(u.size()) + " and " + std::to_string(v.size()));
    }
    const double nu = u.norm();
    const double nv = v.norm();
    if (nu == 0.0 || nv == 0.0) throw ZeroVector("cosine similarity of a zero vector");
    return std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0);
}

std::vector<Eigen::VectorXd> parse_embeddings(std::string_view text) {
    std::vector<Eigen::VectorXd> rows;
    std::size_t start = 0;
    std::size_t line_no = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

        std::vector<double> values;
        std::size_t pos = 0;
        while (pos <= line.size()) {
            std::size_t comma = line.find(',', pos);
            if (comma == std::string_view::npos) comma = line.size();
            std::string_view field = line.substr(pos, comma - pos);
            while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
            while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
            double value = 0.0;
            auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
            if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) {
                throw IoError("embedding line " + std::to_string(line_no) + ": bad number '" + std::string(field) + "'");
            }
            values.push_back(value);
            pos = comma + 1;
        }
        if (!rows.empty() && static_cast<std::size_t>(rows.front().size()) != values.size()) {
            throw DimensionMismatch("embedding line " + std::to_string(line_no) + " has " +
                                    std::to_string(values.size()) + " values");
        }
        rows.push_back(Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size())));
    }
    return rows;
}

std::vector<Eigen::VectorXd> read_embeddings(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_embeddings(buf.str());
}

}  // namespace songtuple
