#pragma once

#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <json.hpp>

#include "songtuple/errors.hpp"
#include "songtuple/json_io.hpp"

namespace songtuple::cli {

/// "-" or "" means standard input.
inline std::string read_input(const std::string& path) {
    if (path.empty() || path == "-") {
        return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
    }
    return read_file(path);
}

/// "-" or "" means standard output.
inline void write_output(const std::string& path, std::string_view content) {
    if (path.empty() || path == "-") {
        std::cout.write(content.data(), static_cast<std::streamsize>(content.size()));
        std::cout.flush();
        return;
    }
    write_file(path, content);
}

/// Per-record failures go to stderr and, when set, to the error log file.
class Failures {
public:
    void open_log(const std::string& path) {
        if (path.empty()) return;
        log_.open(path, std::ios::binary | std::ios::trunc);
        if (!log_) throw IoError("cannot open " + path + " for writing");
    }

    void add(const std::string& where, const std::string& what) {
        std::lock_guard lock(mutex_);
        ++count_;
        const std::string line = where + ": " + what + "\n";
        std::cerr << line;
        if (log_.is_open()) log_ << line;
    }

    std::size_t count() const { return count_; }

private:
    std::mutex mutex_;
    std::ofstream log_;
    std::size_t count_ = 0;
};

struct Record {
    std::string where;  ///< "file:line"
    nlohmann::json value;

    std::string id() const {
        if (value.is_object() && value.contains("id")) {
            const auto& id = value["id"];
            return id.is_string() ? id.get<std::string>() : id.dump();
        }
        return where;
    }
};

/// JSON-lines input; lines that are not JSON are reported and skipped.
inline std::vector<Record> read_records(const std::string& path, Failures& failures) {
    const std::string text = read_input(path);
    const std::string name = path.empty() || path == "-" ? "<stdin>" : path;
    std::vector<Record> out;
    std::size_t start = 0, number = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string::npos) end = text.size();
        const std::string_view line(text.data() + start, end - start);
        start = end + 1;
        ++number;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        const std::string where = name + ":" + std::to_string(number);
        try {
            out.push_back({where, nlohmann::json::parse(line)});
        } catch (const nlohmann::json::exception& e) {
            failures.add(where, std::string("not JSON: ") + e.what());
        }
    }
    return out;
}

template <typename T>
using Outcome = std::variant<T, std::string>;

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. Results come back in
/// index order; a thrown songtuple::Error or JSON error becomes the message.
template <typename T, typename Fn>
std::vector<Outcome<T>> parallel_map(std::size_t n, unsigned jobs, Fn fn) {
    std::vector<Outcome<T>> results(n, Outcome<T>(std::string()));
    const auto run_one = [&](std::size_t i) {
        try {
            results[i] = fn(i);
        } catch (const Error& e) {
            results[i] = std::string(e.what());
        } catch (const nlohmann::json::exception& e) {
            results[i] = std::string(e.what());
        }
    };
    const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) run_one(i);
        return results;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) run_one(i);
        });
    }
    for (auto& t : pool) t.join();
    return results;
}

inline std::string jsonl(const std::vector<nlohmann::json>& rows) {
    std::string out;
    for (const auto& row : rows) out += row.dump() + "\n";
    return out;
}

}  // namespace songtuple::cli
