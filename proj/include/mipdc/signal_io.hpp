#pragma once

#include "mipdc/types.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mipdc {

/// Half-open sample range [start, end) with an optional task label.
struct TrialMark {
    Index start = 0;
    Index end = 0;
    std::optional<ClassLabel> label;

    Index length() const { return end - start; }
};

/// Multichannel recording, samples stored channels x time.
struct Recording {
    MatrixN samples;
    double sample_rate_hz = kDefaultSampleRateHz;
    std::vector<std::string> channel_names;
    std::vector<TrialMark> trial_marks;

    Index n_channels() const { return samples.rows(); }
    Index n_samples() const { return samples.cols(); }

    /// Throws ContractError when an invariant is broken.
    void validate() const;
};

struct Epoch {
    MatrixN samples;  // channels x epoch_length
    ClassLabel label = ClassLabel::Class1;
    std::size_t source_trial = 0;
};

struct EpochSet {
    std::vector<Epoch> epochs;
    double sample_rate_hz = kDefaultSampleRateHz;
    std::vector<std::string> channel_names;

    Index n_channels() const { return static_cast<Index>(channel_names.size()); }
    Index epoch_length() const { return epochs.empty() ? 0 : epochs.front().samples.cols(); }
    std::size_t count(ClassLabel c) const;
    /// Epochs of one class, in original order.
    std::vector<const Epoch*> of_class(ClassLabel c) const;
    /// Throws ContractError unless both classes are present.
    void require_two_classes() const;
};

enum class SignalFormat { Csv, Binary };

/// Sidecar events path: "<dir>/<stem>.events.csv".
std::filesystem::path events_path_for(const std::filesystem::path& signal_path);

/// Reads a recording and, when present, its events sidecar. CSV carries no
/// sample rate, so `csv_sample_rate_hz` supplies it; binary files store their own.
Recording load_recording(const std::filesystem::path& path, SignalFormat format,
                         double csv_sample_rate_hz = kDefaultSampleRateHz);

/// Writes the signal file plus an events sidecar when the recording has labeled trials.
void save_recording(const std::filesystem::path& path, const Recording& rec, SignalFormat format);

std::vector<TrialMark> load_events(const std::filesystem::path& path);
void save_events(const std::filesystem::path& path, const std::vector<TrialMark>& marks);

/// Cuts every trial into floor(len / epoch_len) back-to-back epochs; the
/// remainder of each trial is dropped.
EpochSet segment_epochs(const Recording& rec, double epoch_seconds);

/// Labeled CSV matrix; values printed with 17 significant digits.
void save_matrix(const std::filesystem::path& path, const ConstMatRefN& matrix,
                 const std::vector<std::string>& row_labels,
                 const std::vector<std::string>& col_labels);

struct LabeledMatrix {
    MatrixN values;
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
};

LabeledMatrix load_matrix(const std::filesystem::path& path);

/// Formats with 17 significant digits ("%.17g").
std::string format_number(double v);

}  // namespace mipdc
