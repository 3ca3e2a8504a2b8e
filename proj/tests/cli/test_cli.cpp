// Black-box checks of the songtuple executable.

#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "songtuple/json_io.hpp"
#include "songtuple/tuple_text.hpp"

namespace fs = std::filesystem;
using namespace songtuple;

namespace {

const fs::path kCli = SONGTUPLE_CLI;
const fs::path kToy = SONGTUPLE_TOY_DIR;
const fs::path kWork = SONGTUPLE_WORK_DIR;

struct Run {
    int status;
    std::string out;
    std::string err;
};

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

Run run(const std::string& args, const std::string& stdin_text = "") {
    fs::create_directories(kWork);
    const fs::path in = kWork / "stdin.txt", out = kWork / "stdout.txt", err = kWork / "stderr.txt";
    write_file(in, stdin_text);
    const int raw = std::system((q(kCli) + " " + args + " <" + q(in) + " >" + q(out) + " 2>" + q(err)).c_str());
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, read_file(out), read_file(err)};
}

fs::path work_file(const std::string& name, const std::string& content) {
    fs::create_directories(kWork);
    const fs::path p = kWork / name;
    write_file(p, content);
    return p;
}

std::string midi_args() {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(kToy / "midi")) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::string args;
    for (const auto& f : files) args += " " + q(f);
    return args;
}

}  // namespace

TEST_CASE("encode and decode durations") {
    const Run enc = run("encode-duration 0.5");
    CHECK(enc.status == 0);
    CHECK(enc.out == "169\n");
    const Run dec = run("decode-duration 511");
    CHECK(dec.status == 0);
    CHECK(std::stod(dec.out) == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("malformed tuple text exits 1 with a position") {
    const std::string doc =
        "The following is the melody:\n"
        "The first line: ⟨C4⟩, ⟨d_10⟩ |\n";
    const Run r = run("parse -i " + q(work_file("bad.txt", doc)));
    CHECK(r.status == 1);
    CHECK(r.err.find("bad.txt:2:") != std::string::npos);
}

TEST_CASE("usage errors exit 2") {
    CHECK(run("encode-duration").status == 2);
    CHECK(run("build-pretrain --seed 1").status == 2);
    CHECK(run("no-such-command").status == 2);
}

TEST_CASE("serialize then parse reproduces the records") {
    const std::string records =
        R"({"kind":"paired","language":"en","lines":[[{"word":"hello","notes":[["C4",100,0]]}]]})"
        "\n";
    const Run ser = run("serialize", records);
    REQUIRE(ser.status == 0);
    const Run back = run("parse", ser.out);
    REQUIRE(back.status == 0);
    CHECK(entry_from_json(json::parse(back.out)) == entry_from_json(json::parse(records)));
}

TEST_CASE("evaluating a corpus against itself is perfect") {
    const fs::path gen = kToy / "generated.jsonl";
    const Run r = run("evaluate --gen " + q(gen) + " --ref " + q(gen));
    REQUIRE(r.status == 0);
    const json report = json::parse(r.out);
    CHECK(report["pairs"] == 10);
    CHECK(report["pd"].get<double>() == doctest::Approx(100.0));
    CHECK(report["dd"].get<double>() == doctest::Approx(100.0));
    CHECK(report["md"].get<double>() == doctest::Approx(0.0));
}

TEST_CASE("extraction output does not depend on the worker count") {
    const Run one = run("extract-midi -j 1" + midi_args());
    const Run many = run("extract-midi -j 4" + midi_args());
    REQUIRE(one.status == 0);
    CHECK(one.out == many.out);
    CHECK(std::count(one.out.begin(), one.out.end(), '\n') == 10);
}

TEST_CASE("text-to-song pairs use the matching summary") {
    const std::string paired =
        R"({"id":"a","kind":"paired","language":"en","lines":[[{"word":"hi","notes":[["C4",100,0]]}]]})" "\n"
        R"({"id":"b","kind":"paired","language":"en","lines":[[{"word":"yo","notes":[["D4",90,3]]}]]})" "\n";
    const fs::path in = work_file("paired.jsonl", paired);
    const fs::path summaries = work_file("summaries.jsonl", "{\"id\":\"b\",\"summary\":\"bright\"}\n{\"id\":\"a\",\"summary\":\"calm\"}\n");
    const Run r = run("build-sft --task t2s -i " + q(in) + " --summaries " + q(summaries));
    REQUIRE(r.status == 0);
    const auto rows = parse_jsonl(r.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].value["prompt"].get<std::string>().find("calm") != std::string::npos);
    CHECK(rows[1].value["prompt"].get<std::string>().find("bright") != std::string::npos);
    CHECK(parse(rows[1].value["answer"].get<std::string>()).lines.front().front().word == "yo");

    CHECK(run("build-sft --task t2s -i " + q(in)).status != 0);
}
