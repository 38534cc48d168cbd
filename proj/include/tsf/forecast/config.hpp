#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tsf/ad/loss.hpp"
#include "tsf/ad/optim.hpp"
#include "tsf/error.hpp"

namespace tsf::forecast {

enum class Architecture { Seq2VecRNN, Seq2SeqRNN, LSTMWindow, PreprocessCNN, FullCNN };

inline std::string to_string(Architecture a) {
    switch (a) {
        case Architecture::Seq2VecRNN: return "seq2vec_rnn";
        case Architecture::Seq2SeqRNN: return "seq2seq_rnn";
        case Architecture::LSTMWindow: return "lstm";
        case Architecture::PreprocessCNN: return "preprocess_cnn";
        case Architecture::FullCNN: return "full_cnn";
    }
    return "unknown";
}

inline Architecture architecture_from_string(const std::string& s) {
    for (auto a : {Architecture::Seq2VecRNN, Architecture::Seq2SeqRNN, Architecture::LSTMWindow,
                   Architecture::PreprocessCNN, Architecture::FullCNN})
        if (to_string(a) == s) return a;
    throw ConfigError("unknown architecture '" + s + "'");
}

inline bool is_recurrent(Architecture a) { return a != Architecture::FullCNN; }

struct ForecasterConfig {
    Architecture architecture = Architecture::LSTMWindow;
    std::size_t window_size = 30;
    std::size_t hidden_units = 32;
    std::size_t layers = 2;
    std::size_t conv_filters = 32;
    std::size_t conv_kernel = 5;
    std::vector<std::size_t> dilations;  // FullCNN only
    std::size_t epochs = 100;
    std::size_t batch_size = 128;
    /// nullopt runs the learning-rate range finder before training.
    std::optional<double> learning_rate = 1e-3;
    std::uint64_t seed = 42;
    ad::LossSpec loss{};
    ad::OptimizerKind optimizer = ad::OptimizerKind::Adam;
    bool standardize = false;
    /// Early stop after this many epochs without improvement of the training loss; 0 disables.
    std::size_t patience = 20;
    /// Global-norm gradient clip for recurrent architectures; 0 disables.
    double clip_norm = 1.0;

    /// Architecture defaults: 100 units for plain RNNs, 32 for LSTM/CNN stacks,
    /// kernel 5 for the preprocess conv, kernel 2 with dilations 1..32 for the WaveNet stack.
    static ForecasterConfig defaults(Architecture arch) {
        ForecasterConfig c;
        c.architecture = arch;
        switch (arch) {
            case Architecture::Seq2VecRNN:
            case Architecture::Seq2SeqRNN:
                c.hidden_units = 100;
                c.conv_kernel = 0;
                c.conv_filters = 0;
                break;
            case Architecture::LSTMWindow:
                c.hidden_units = 32;
                c.conv_kernel = 0;
                c.conv_filters = 0;
                break;
            case Architecture::PreprocessCNN:
                c.hidden_units = 32;
                c.conv_filters = 32;
                c.conv_kernel = 5;
                break;
            case Architecture::FullCNN:
                c.hidden_units = 0;
                c.layers = 0;
                c.conv_filters = 32;
                c.conv_kernel = 2;
                c.dilations = {1, 2, 4, 8, 16, 32};
                c.clip_norm = 0.0;
                break;
        }
        return c;
    }

    void validate() const {
        auto fail = [&](const std::string& what) { throw ConfigError(to_string(architecture) + ": " + what); };
        if (window_size < 1) fail("window_size must be >= 1");
        if (batch_size < 1) fail("batch_size must be >= 1");
        if (learning_rate && !(*learning_rate > 0.0)) fail("learning_rate must be positive");
        const bool full_cnn = architecture == Architecture::FullCNN;
        if (full_cnn) {
            if (dilations.empty()) fail("dilation schedule required");
            for (auto d : dilations)
                if (d < 1) fail("dilations must be >= 1");
            if (conv_kernel < 1 || conv_filters < 1) fail("conv_kernel and conv_filters must be >= 1");
        } else {
            if (!dilations.empty()) fail("dilation schedule only applies to full_cnn");
            if (hidden_units < 1 || layers < 1) fail("hidden_units and layers must be >= 1");
        }
        if (architecture == Architecture::PreprocessCNN && (conv_kernel < 1 || conv_filters < 1))
            fail("conv_kernel and conv_filters must be >= 1");
    }
};

}  // namespace tsf::forecast
