#include "mipdc/signal_io.hpp"

#include "mipdc/errors.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

namespace mipdc {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const auto comma = line.find(',', pos);
        out.push_back(trim(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos)));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

double parse_double(std::string_view cell, std::size_t row, std::size_t col) {
    if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
    double v = 0.0;
    const auto* end = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(cell.data(), end, v);
    if (cell.empty() || ec != std::errc() || ptr != end)
        throw ParseError("non-numeric cell '" + std::string(cell) + "'", row, col);
    return v;
}

std::ifstream open_in(const fs::path& path, std::ios::openmode mode = std::ios::in) {
    std::ifstream in(path, mode);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    return in;
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream out(path, mode | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    return out;
}

// Reads all non-blank lines; row numbers reported to users are 1-based file lines.
std::vector<std::pair<std::size_t, std::string>> read_lines(const fs::path& path) {
    auto in = open_in(path);
    std::vector<std::pair<std::size_t, std::string>> lines;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1 && line.size() >= 3 && std::memcmp(line.data(), "\xEF\xBB\xBF", 3) == 0)
            line.erase(0, 3);
        if (trim(line).empty()) continue;
        lines.emplace_back(lineno, std::move(line));
    }
    return lines;
}

std::vector<std::string> generic_names(Index n) {
    if (n == static_cast<Index>(default_channel_names().size())) return default_channel_names();
    std::vector<std::string> names;
    for (Index i = 0; i < n; ++i) names.push_back("ch" + std::to_string(i + 1));
    return names;
}

template <typename T>
void put_le(std::ostream& out, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    std::array<unsigned char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T get_le(std::istream& in, const fs::path& path) {
    std::array<unsigned char, sizeof(T)> bytes;
    if (!in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T)))
        throw FormatError("'" + path.string() + "' is truncated");
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    T value;
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
}

Recording load_csv(const fs::path& path, double sample_rate_hz) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw FormatError("'" + path.string() + "' is empty: missing header row");

    Recording rec;
    rec.sample_rate_hz = sample_rate_hz;
    std::set<std::string> seen;
    for (auto name : split_csv(lines.front().second)) {
        if (name.empty()) throw FormatError("malformed header in '" + path.string() + "': empty channel name");
        double dummy;
        const auto [ptr, ec] = std::from_chars(name.data(), name.data() + name.size(), dummy);
        if (ec == std::errc() && ptr == name.data() + name.size())
            throw FormatError("malformed header in '" + path.string() + "': numeric channel name '" +
                              std::string(name) + "'");
        if (!seen.insert(std::string(name)).second)
            throw FormatError("malformed header in '" + path.string() + "': duplicate channel '" +
                              std::string(name) + "'");
        rec.channel_names.emplace_back(name);
    }

    const auto n_ch = static_cast<Index>(rec.channel_names.size());
    const auto n_t = static_cast<Index>(lines.size() - 1);
    rec.samples.resize(n_ch, n_t);
    for (Index t = 0; t < n_t; ++t) {
        const auto& [lineno, text] = lines[static_cast<std::size_t>(t) + 1];
        const auto cells = split_csv(text);
        if (static_cast<Index>(cells.size()) != n_ch)
            throw FormatError("ragged row at line " + std::to_string(lineno) + " of '" + path.string() +
                              "': expected " + std::to_string(n_ch) + " columns, got " +
                              std::to_string(cells.size()));
        for (Index c = 0; c < n_ch; ++c)
            rec.samples(c, t) = parse_double(cells[static_cast<std::size_t>(c)], lineno, static_cast<std::size_t>(c) + 1);
    }
    return rec;
}

Recording load_binary(const fs::path& path) {
    auto in = open_in(path, std::ios::binary);
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "PDCF", 4) != 0)
        throw FormatError("'" + path.string() + "' does not start with PDCF magic");
    const auto n_ch = get_le<std::uint32_t>(in, path);
    const auto n_t = get_le<std::uint32_t>(in, path);
    const auto rate = get_le<double>(in, path);
    if (!(rate > 0.0)) throw FormatError("'" + path.string() + "' has non-positive sample rate");

    Recording rec;
    rec.sample_rate_hz = rate;
    rec.samples.resize(n_ch, n_t);
    for (Index c = 0; c < static_cast<Index>(n_ch); ++c)
        for (Index t = 0; t < static_cast<Index>(n_t); ++t) rec.samples(c, t) = get_le<double>(in, path);
    if (in.peek() != std::char_traits<char>::eof())
        throw FormatError("'" + path.string() + "' has trailing bytes after sample block");
    rec.channel_names = generic_names(n_ch);
    return rec;
}

}  // namespace

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void Recording::validate() const {
    require(sample_rate_hz > 0.0, "sample rate must be positive");
    require(static_cast<Index>(channel_names.size()) == samples.rows(),
            "channel name count does not match channel count");
    for (std::size_t k = 0; k < trial_marks.size(); ++k) {
        const auto& m = trial_marks[k];
        require(m.start >= 0 && m.start < m.end && m.end <= samples.cols(),
                "trial " + std::to_string(k) + " range [" + std::to_string(m.start) + ", " +
                    std::to_string(m.end) + ") outside recording of " + std::to_string(samples.cols()) +
                    " samples");
    }
}

std::size_t EpochSet::count(ClassLabel c) const {
    std::size_t n = 0;
    for (const auto& e : epochs) n += e.label == c;
    return n;
}

std::vector<const Epoch*> EpochSet::of_class(ClassLabel c) const {
    std::vector<const Epoch*> out;
    for (const auto& e : epochs)
        if (e.label == c) out.push_back(&e);
    return out;
}

void EpochSet::require_two_classes() const {
    require(count(ClassLabel::Class1) > 0 && count(ClassLabel::Class2) > 0,
            "two-class analysis needs at least one epoch of each class");
}

fs::path events_path_for(const fs::path& signal_path) {
    auto p = signal_path;
    p.replace_filename(signal_path.stem().string() + ".events.csv");
    return p;
}

std::vector<TrialMark> load_events(const fs::path& path) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw FormatError("'" + path.string() + "' is empty: missing header row");
    const auto header = split_csv(lines.front().second);
    if (header.size() != 3 || header[0] != "start" || header[1] != "end" || header[2] != "label")
        throw FormatError("malformed header in '" + path.string() + "': expected start,end,label");

    std::vector<TrialMark> marks;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto& [lineno, text] = lines[r];
        const auto cells = split_csv(text);
        if (cells.size() != 3)
            throw FormatError("ragged row at line " + std::to_string(lineno) + " of '" + path.string() + "'");
        long long v[3];
        for (std::size_t c = 0; c < 3; ++c) {
            const auto [ptr, ec] = std::from_chars(cells[c].data(), cells[c].data() + cells[c].size(), v[c]);
            if (cells[c].empty() || ec != std::errc() || ptr != cells[c].data() + cells[c].size())
                throw ParseError("non-integer cell '" + std::string(cells[c]) + "'", lineno, c + 1);
        }
        if (v[2] != 1 && v[2] != 2) throw ParseError("label must be 1 or 2", lineno, 3);
        marks.push_back({static_cast<Index>(v[0]), static_cast<Index>(v[1]), static_cast<ClassLabel>(v[2])});
    }
    return marks;
}

void save_events(const fs::path& path, const std::vector<TrialMark>& marks) {
    auto out = open_out(path);
    out << "start,end,label\n";
    for (const auto& m : marks) {
        require(m.label.has_value(), "cannot save an unlabeled trial to an events file");
        out << m.start << ',' << m.end << ',' << to_int(*m.label) << '\n';
    }
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

Recording load_recording(const fs::path& path, SignalFormat format, double csv_sample_rate_hz) {
    if (!fs::exists(path)) throw IoError("input file '" + path.string() + "' does not exist");
    auto rec = format == SignalFormat::Csv ? load_csv(path, csv_sample_rate_hz) : load_binary(path);
    if (const auto ev = events_path_for(path); fs::exists(ev)) {
        rec.trial_marks = load_events(ev);
    } else if (rec.n_samples() > 0) {
        rec.trial_marks.push_back({0, rec.n_samples(), std::nullopt});
    }
    rec.validate();
    return rec;
}

void save_recording(const fs::path& path, const Recording& rec, SignalFormat format) {
    rec.validate();
    if (format == SignalFormat::Csv) {
        auto out = open_out(path);
        for (std::size_t c = 0; c < rec.channel_names.size(); ++c)
            out << (c ? "," : "") << rec.channel_names[c];
        out << '\n';
        for (Index t = 0; t < rec.n_samples(); ++t) {
            for (Index c = 0; c < rec.n_channels(); ++c) out << (c ? "," : "") << format_number(rec.samples(c, t));
            out << '\n';
        }
        if (!out) throw IoError("write failed for '" + path.string() + "'");
    } else {
        auto out = open_out(path, std::ios::binary);
        out.write("PDCF", 4);
        put_le(out, static_cast<std::uint32_t>(rec.n_channels()));
        put_le(out, static_cast<std::uint32_t>(rec.n_samples()));
        put_le(out, rec.sample_rate_hz);
        for (Index c = 0; c < rec.n_channels(); ++c)
            for (Index t = 0; t < rec.n_samples(); ++t) put_le(out, rec.samples(c, t));
        if (!out) throw IoError("write failed for '" + path.string() + "'");
    }
    bool labeled = !rec.trial_marks.empty();
    for (const auto& m : rec.trial_marks) labeled = labeled && m.label.has_value();
    if (labeled) save_events(events_path_for(path), rec.trial_marks);
}

EpochSet segment_epochs(const Recording& rec, double epoch_seconds) {
    require(epoch_seconds > 0.0, "epoch length must be positive");
    rec.validate();
    const auto epoch_len = static_cast<Index>(std::lround(epoch_seconds * rec.sample_rate_hz));
    require(epoch_len >= 1, "epoch shorter than one sample");

    EpochSet set;
    set.sample_rate_hz = rec.sample_rate_hz;
    set.channel_names = rec.channel_names;
    for (std::size_t k = 0; k < rec.trial_marks.size(); ++k) {
        const auto& trial = rec.trial_marks[k];
        if (!trial.label)
            throw EpochingError("trial " + std::to_string(k) + " has no class label (missing events file?)");
        if (trial.length() < epoch_len)
            throw EpochingError("trial " + std::to_string(k) + " spans " + std::to_string(trial.length()) +
                                " samples, shorter than one epoch of " + std::to_string(epoch_len));
        const Index n_epochs = trial.length() / epoch_len;
        for (Index e = 0; e < n_epochs; ++e)
            set.epochs.push_back({rec.samples.middleCols(trial.start + e * epoch_len, epoch_len), *trial.label, k});
    }
    return set;
}

void save_matrix(const fs::path& path, const ConstMatRefN& matrix, const std::vector<std::string>& row_labels,
                 const std::vector<std::string>& col_labels) {
    require(static_cast<Index>(row_labels.size()) == matrix.rows(), "row label count does not match matrix rows");
    require(static_cast<Index>(col_labels.size()) == matrix.cols(), "column label count does not match matrix columns");
    auto out = open_out(path);
    out << "label";
    for (const auto& c : col_labels) out << ',' << c;
    out << '\n';
    for (Index r = 0; r < matrix.rows(); ++r) {
        out << row_labels[static_cast<std::size_t>(r)];
        for (Index c = 0; c < matrix.cols(); ++c) out << ',' << format_number(matrix(r, c));
        out << '\n';
    }
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

LabeledMatrix load_matrix(const fs::path& path) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw FormatError("'" + path.string() + "' is empty");
    LabeledMatrix m;
    const auto header = split_csv(lines.front().second);
    for (std::size_t c = 1; c < header.size(); ++c) m.col_labels.emplace_back(header[c]);
    const auto n_cols = static_cast<Index>(m.col_labels.size());
    m.values.resize(static_cast<Index>(lines.size()) - 1, n_cols);
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto& [lineno, text] = lines[r];
        const auto cells = split_csv(text);
        if (static_cast<Index>(cells.size()) != n_cols + 1)
            throw FormatError("ragged row at line " + std::to_string(lineno) + " of '" + path.string() + "'");
        m.row_labels.emplace_back(cells[0]);
        for (Index c = 0; c < n_cols; ++c)
            m.values(static_cast<Index>(r) - 1, c) = parse_double(cells[static_cast<std::size_t>(c) + 1], lineno, static_cast<std::size_t>(c) + 2);
    }
    return m;
}

}  // namespace mipdc
