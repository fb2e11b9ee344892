#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mipdc/errors.hpp"
#include "mipdc/signal_io.hpp"
#include "support.hpp"

#include <fstream>

using namespace mipdc;

namespace {

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

Recording labeled_recording(Index channels, const std::vector<Index>& trial_lengths, double fs, std::uint64_t seed) {
    Recording rec;
    rec.sample_rate_hz = fs;
    Index total = 0;
    for (Index len : trial_lengths) total += len;
    rec.samples.resize(channels, total);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 3.0);
    for (Index c = 0; c < channels; ++c)
        for (Index t = 0; t < total; ++t) rec.samples(c, t) = normal(rng);
    for (Index c = 0; c < channels; ++c) rec.channel_names.push_back("ch" + std::to_string(c));
    Index at = 0;
    for (std::size_t i = 0; i < trial_lengths.size(); ++i) {
        rec.trial_marks.push_back({at, at + trial_lengths[i], i % 2 == 0 ? ClassLabel::Class1 : ClassLabel::Class2});
        at += trial_lengths[i];
    }
    return rec;
}

}  // namespace

TEST_CASE("csv with three channels and five rows loads as 3x5") {
    testing::TempDir dir("io");
    write_file(dir / "r.csv", "a,b,c\n1,2,3\n4,5,6\n7,8,9\n10,11,12\n13,14,15\n");
    const auto rec = load_recording(dir / "r.csv", SignalFormat::Csv, 250.0);
    CHECK(rec.n_channels() == 3);
    CHECK(rec.n_samples() == 5);
    CHECK(rec.samples(1, 2) == 8.0);
    CHECK(rec.sample_rate_hz == 250.0);
    REQUIRE(rec.trial_marks.size() == 1);
    CHECK_FALSE(rec.trial_marks[0].label.has_value());
    CHECK(rec.trial_marks[0].end == 5);
}

TEST_CASE("montage csv with ten labeled trials") {
    testing::TempDir dir("io");
    const auto& names = default_channel_names();
    REQUIRE(names.size() == 16);
    std::string text;
    for (std::size_t i = 0; i < names.size(); ++i) text += (i ? "," : "") + names[i];
    text += "\n";
    for (int r = 0; r < 100; ++r) {
        for (int c = 0; c < 16; ++c) text += (c ? "," : "") + std::to_string(r * 16 + c);
        text += "\n";
    }
    write_file(dir / "eeg.csv", text);
    std::string events = "start,end,label\n";
    for (int t = 0; t < 10; ++t) events += std::to_string(t * 10) + "," + std::to_string(t * 10 + 10) + "," + (t % 2 ? "2" : "1") + "\n";
    write_file(dir / "eeg.events.csv", events);

    const auto rec = load_recording(dir / "eeg.csv", SignalFormat::Csv);
    CHECK(rec.n_channels() == 16);
    CHECK(rec.channel_names == names);
    CHECK(rec.trial_marks.size() == 10);
    CHECK(rec.trial_marks[3].label == ClassLabel::Class2);
    CHECK(rec.samples(15, 99) == 99 * 16 + 15);
}

TEST_CASE("ragged row is a format error naming the line") {
    testing::TempDir dir("io");
    write_file(dir / "bad.csv", "a,b,c,d\n1,2,3,4\n1,2,3,4,5\n");
    try {
        load_recording(dir / "bad.csv", SignalFormat::Csv);
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find("3") != std::string::npos);
    }
}

TEST_CASE("malformed inputs") {
    testing::TempDir dir("io");
    write_file(dir / "empty.csv", "");
    CHECK_THROWS_AS(load_recording(dir / "empty.csv", SignalFormat::Csv), FormatError);
    write_file(dir / "numhead.csv", "1,2\n3,4\n");
    CHECK_THROWS_AS(load_recording(dir / "numhead.csv", SignalFormat::Csv), FormatError);
    write_file(dir / "dup.csv", "a,a\n3,4\n");
    CHECK_THROWS_AS(load_recording(dir / "dup.csv", SignalFormat::Csv), FormatError);

    write_file(dir / "nan.csv", "a,b\n1,2\n3,x4\n");
    try {
        load_recording(dir / "nan.csv", SignalFormat::Csv);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.row() == 3);
        CHECK(e.column() == 2);
    }
    CHECK_THROWS_AS(load_recording(dir / "missing.csv", SignalFormat::Csv), IoError);
    write_file(dir / "bad.bin", "PDCX0000");
    CHECK_THROWS_AS(load_recording(dir / "bad.bin", SignalFormat::Binary), FormatError);
}

TEST_CASE("round trip within 1e-9 relative for csv and binary") {
    testing::TempDir dir("io");
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto rec = labeled_recording(4, {37, 50, 13}, 512.0, seed);
        rec.samples(0, 0) = 1e-300;
        rec.samples(1, 1) = -7.25e12;
        for (auto fmt : {SignalFormat::Csv, SignalFormat::Binary}) {
            const auto path = dir / (fmt == SignalFormat::Csv ? "r.csv" : "r.bin");
            save_recording(path, rec, fmt);
            const auto back = load_recording(path, fmt, 512.0);
            REQUIRE(back.samples.rows() == rec.samples.rows());
            REQUIRE(back.samples.cols() == rec.samples.cols());
            const double rel = ((back.samples - rec.samples).cwiseAbs().array() /
                                rec.samples.cwiseAbs().array().max(1e-300)).maxCoeff();
            CHECK(rel <= 1e-9);
            CHECK(back.sample_rate_hz == 512.0);
            REQUIRE(back.trial_marks.size() == rec.trial_marks.size());
            for (std::size_t i = 0; i < rec.trial_marks.size(); ++i) {
                CHECK(back.trial_marks[i].start == rec.trial_marks[i].start);
                CHECK(back.trial_marks[i].end == rec.trial_marks[i].end);
                CHECK(back.trial_marks[i].label == rec.trial_marks[i].label);
            }
        }
    }
}

TEST_CASE("ten second trial at 1200 Hz yields ten one-second epochs") {
    Recording rec;
    rec.samples = MatrixN::Zero(2, 12000);
    rec.channel_names = {"a", "b"};
    rec.trial_marks = {{0, 12000, ClassLabel::Class1}};
    const auto set = segment_epochs(rec, 1.0);
    CHECK(set.epochs.size() == 10);
    CHECK(set.epoch_length() == 1200);
}

TEST_CASE("exact single epoch and short trial") {
    Recording rec;
    rec.samples = MatrixN::Zero(1, 1800);
    rec.channel_names = {"a"};
    rec.trial_marks = {{0, 1200, ClassLabel::Class1}, {1200, 1800, ClassLabel::Class2}};
    CHECK_THROWS_AS(segment_epochs(rec, 1.0), EpochingError);
    rec.trial_marks.pop_back();
    const auto set = segment_epochs(rec, 1.0);
    CHECK(set.epochs.size() == 1);

    rec.trial_marks = {{0, 1200, std::nullopt}};
    CHECK_THROWS_AS(segment_epochs(rec, 1.0), EpochingError);
}

TEST_CASE("epochs never straddle trials and counts add up") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<Index> len_dist(100, 1000);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<Index> lens;
        for (int t = 0; t < 7; ++t) lens.push_back(len_dist(rng));
        auto rec = labeled_recording(3, lens, 100.0, static_cast<std::uint64_t>(rep));
        // Channel 0 carries the trial index as a watermark.
        for (std::size_t t = 0; t < rec.trial_marks.size(); ++t)
            rec.samples.row(0).segment(rec.trial_marks[t].start, rec.trial_marks[t].length()).setConstant(double(t));
        const auto set = segment_epochs(rec, 0.9);
        std::size_t expected = 0;
        for (Index len : lens) expected += static_cast<std::size_t>(len / 90);
        CHECK(set.epochs.size() == expected);
        for (const auto& e : set.epochs) {
            CHECK(e.samples.cols() == 90);
            CHECK(e.samples.row(0).minCoeff() == e.samples.row(0).maxCoeff());
            CHECK(e.samples(0, 0) == double(e.source_trial));
            CHECK(e.label == *rec.trial_marks[e.source_trial].label);
        }
    }
}

TEST_CASE("two class requirement") {
    EpochSet set;
    set.epochs.push_back({MatrixN::Zero(1, 4), ClassLabel::Class1, 0});
    CHECK_THROWS_AS(set.require_two_classes(), ContractError);
    set.epochs.push_back({MatrixN::Zero(1, 4), ClassLabel::Class2, 1});
    CHECK_NOTHROW(set.require_two_classes());
}

TEST_CASE("recording validation") {
    Recording rec;
    rec.samples = MatrixN::Zero(2, 10);
    rec.channel_names = {"a"};
    CHECK_THROWS_AS(rec.validate(), ContractError);
    rec.channel_names = {"a", "b"};
    rec.trial_marks = {{5, 11, ClassLabel::Class1}};
    CHECK_THROWS_AS(rec.validate(), ContractError);
    rec.trial_marks = {{5, 10, ClassLabel::Class1}};
    CHECK_NOTHROW(rec.validate());
    rec.sample_rate_hz = 0.0;
    CHECK_THROWS_AS(rec.validate(), ContractError);
}

TEST_CASE("labeled matrices") {
    testing::TempDir dir("io");
    SUBCASE("identity round trips exactly in three lines") {
        save_matrix(dir / "m.csv", MatrixN::Identity(2, 2), {"r1", "r2"}, {"c1", "c2"});
        std::ifstream in(dir / "m.csv");
        int lines = 0;
        for (std::string line; std::getline(in, line);) ++lines;
        CHECK(lines == 3);
        const auto back = load_matrix(dir / "m.csv");
        CHECK(back.values == MatrixN::Identity(2, 2));
        CHECK(back.row_labels == std::vector<std::string>{"r1", "r2"});
    }
    SUBCASE("16 x 23 map") {
        MatrixN m = MatrixN::Random(16, 23).cwiseAbs();
        std::vector<std::string> cols;
        for (double f : frequency_grid(8, 30, 1)) cols.push_back(format_number(f));
        save_matrix(dir / "rsq.csv", m, default_channel_names(), cols);
        const auto back = load_matrix(dir / "rsq.csv");
        CHECK(back.values.rows() == 16);
        CHECK(back.values.cols() == 23);
        CHECK((back.values - m).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("label mismatch") {
        CHECK_THROWS_AS(save_matrix(dir / "x.csv", MatrixN::Zero(2, 2), {"a"}, {"b", "c"}), ContractError);
    }
    SUBCASE("unwritable path") {
        CHECK_THROWS_AS(save_matrix(dir / "no/such/dir/x.csv", MatrixN::Zero(1, 1), {"a"}, {"b"}), IoError);
    }
}
