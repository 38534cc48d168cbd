#pragma once

#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "tsf/ad/params.hpp"
#include "tsf/error.hpp"

namespace tsf::ad {

/*
 * Checkpoint text layout, version 1:
 *
 *   tsf-checkpoint 1
 *   meta <key> <value to end of line>        (zero or more)
 *   params <count>
 *   param <name> <rank> <d0> ... <d{rank-1}>
 *   <numel values as C99 hex floats, space separated, one line>
 *   ...                                      (repeated count times)
 *   end
 *
 * Hex floats make the round trip bit-exact.
 */
inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
    std::map<std::string, std::string> meta;
    std::vector<std::pair<std::string, Tensor>> params;
};

inline std::string save_checkpoint(const ParameterStore& store, const std::map<std::string, std::string>& meta = {}) {
    std::string out = "tsf-checkpoint " + std::to_string(kCheckpointVersion) + "\n";
    for (const auto& [k, v] : meta) {
        if (k.find_first_of(" \n") != std::string::npos || v.find('\n') != std::string::npos)
            throw InputError("checkpoint meta key/value must be single-line and key space-free");
        out += "meta " + k + " " + v + "\n";
    }
    out += "params " + std::to_string(store.size()) + "\n";
    char buf[40];
    for (std::size_t i = 0; i < store.size(); ++i) {
        const auto& p = store[i];
        out += "param " + p.name + " " + std::to_string(p.value.rank());
        for (auto d : p.value.shape()) out += " " + std::to_string(d);
        out += "\n";
        for (std::size_t k = 0; k < p.value.numel(); ++k) {
            std::snprintf(buf, sizeof buf, "%a", p.value[k]);
            if (k) out += ' ';
            out += buf;
        }
        out += "\n";
    }
    out += "end\n";
    return out;
}

inline Checkpoint parse_checkpoint(const std::string& text) {
    std::istringstream in(text);
    std::string line, word;
    auto fail = [](const std::string& what) -> Checkpoint { throw InputError("checkpoint: " + what); };

    if (!std::getline(in, line)) fail("empty blob");
    {
        std::istringstream hs(line);
        int version = 0;
        if (!(hs >> word >> version) || word != "tsf-checkpoint") fail("missing 'tsf-checkpoint' header");
        if (version != kCheckpointVersion) fail("unsupported version " + std::to_string(version));
    }
    Checkpoint ck;
    std::size_t count = 0;
    while (std::getline(in, line)) {
        if (line.rfind("meta ", 0) == 0) {
            auto rest = line.substr(5);
            auto sp = rest.find(' ');
            ck.meta[rest.substr(0, sp)] = sp == std::string::npos ? "" : rest.substr(sp + 1);
            continue;
        }
        std::istringstream ls(line);
        if (!(ls >> word >> count) || word != "params") fail("expected 'params <count>'");
        break;
    }
    for (std::size_t i = 0; i < count; ++i) {
        if (!std::getline(in, line)) fail("truncated before parameter " + std::to_string(i));
        std::istringstream ls(line);
        std::string name;
        std::size_t rank = 0;
        if (!(ls >> word >> name >> rank) || word != "param") fail("malformed param header '" + line + "'");
        Shape shape(rank);
        for (auto& d : shape)
            if (!(ls >> d)) fail("malformed shape for '" + name + "'");
        if (!std::getline(in, line)) fail("missing values for '" + name + "'");
        std::vector<double> values;
        std::istringstream vs(line);
        while (vs >> word) {
            char* end = nullptr;
            values.push_back(std::strtod(word.c_str(), &end));
            if (end != word.c_str() + word.size()) fail("bad value '" + word + "' in '" + name + "'");
        }
        if (values.size() != shape_numel(shape)) fail("value count mismatch for '" + name + "'");
        ck.params.emplace_back(name, Tensor(std::move(shape), std::move(values)));
    }
    if (!std::getline(in, line) || line != "end") fail("missing 'end' marker");
    return ck;
}

/// Loads values into an existing store; names, order and shapes must match.
inline Checkpoint load_checkpoint(const std::string& text, ParameterStore& store) {
    auto ck = parse_checkpoint(text);
    if (ck.params.size() != store.size())
        throw InputError("checkpoint has " + std::to_string(ck.params.size()) + " parameters, model has " +
                         std::to_string(store.size()));
    for (std::size_t i = 0; i < store.size(); ++i) {
        const auto& [name, value] = ck.params[i];
        if (name != store[i].name) throw InputError("checkpoint parameter '" + name + "' where '" + store[i].name + "' expected");
        if (value.shape() != store[i].value.shape())
            throw ShapeError("checkpoint parameter '" + name + "' has shape " + shape_string(value.shape()) +
                             ", model expects " + shape_string(store[i].value.shape()));
    }
    for (std::size_t i = 0; i < store.size(); ++i) store[i].value = ck.params[i].second;
    return ck;
}

}  // namespace tsf::ad
