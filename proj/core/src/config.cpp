#include "seqrc/config.hpp"

#include "seqrc/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

namespace seqrc {

namespace {

std::string trim(std::string_view s)
{
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

[[noreturn]] void parse_fail(const std::string& where, const std::string& what)
{
    throw Error(ErrorCode::ParseError, where + ": " + what);
}

bool valid_bare_key(std::string_view key)
{
    if (key.empty()) return false;
    return std::all_of(key.begin(), key.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
    });
}

// Index of an unquoted '#', or npos.
std::size_t comment_start(const std::string& line)
{
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '\\' && in_string) {
            ++i;
            continue;
        }
        if (line[i] == '"') in_string = !in_string;
        if (line[i] == '#' && !in_string) return i;
    }
    return std::string::npos;
}

int bracket_balance(const std::string& text)
{
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (in_string && text[i] == '\\') {
            ++i;
            continue;
        }
        if (text[i] == '"') in_string = !in_string;
        if (in_string) continue;
        if (text[i] == '[') ++depth;
        if (text[i] == ']') --depth;
    }
    return depth;
}

class ValueParser {
public:
    ValueParser(std::string_view text, std::string where) : text_(text), where_(std::move(where)) {}

    ConfigValue parse_all()
    {
        ConfigValue v = parse_value();
        skip_space();
        if (pos_ != text_.size()) parse_fail(where_, "unexpected trailing text '" + std::string(text_.substr(pos_)) + "'");
        return v;
    }

private:
    void skip_space()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    ConfigValue parse_value()
    {
        skip_space();
        if (pos_ >= text_.size()) parse_fail(where_, "missing value");
        const char c = text_[pos_];
        if (c == '"') return {parse_string()};
        if (c == '[') return {parse_array()};
        return parse_scalar();
    }

    std::string parse_string()
    {
        ++pos_;
        std::string out;
        while (pos_ < text_.size() && text_[pos_] != '"') {
            char c = text_[pos_++];
            if (c == '\\') {
                if (pos_ >= text_.size()) break;
                const char e = text_[pos_++];
                switch (e) {
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                default: parse_fail(where_, std::string("unsupported escape \\") + e);
                }
            } else {
                out += c;
            }
        }
        if (pos_ >= text_.size()) parse_fail(where_, "unterminated string");
        ++pos_;
        return out;
    }

    ConfigValue::Array parse_array()
    {
        ++pos_;
        ConfigValue::Array items;
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == ']') {
            ++pos_;
            return items;
        }
        while (true) {
            items.push_back(parse_value());
            skip_space();
            if (pos_ >= text_.size()) parse_fail(where_, "unterminated array");
            if (text_[pos_] == ',') {
                ++pos_;
                skip_space();
                if (pos_ < text_.size() && text_[pos_] == ']') {
                    ++pos_;
                    return items;
                }
                continue;
            }
            if (text_[pos_] == ']') {
                ++pos_;
                return items;
            }
            parse_fail(where_, "expected ',' or ']' in array");
        }
    }

    ConfigValue parse_scalar()
    {
        std::size_t end = pos_;
        while (end < text_.size() && text_[end] != ',' && text_[end] != ']' &&
               !std::isspace(static_cast<unsigned char>(text_[end])))
            ++end;
        std::string token(text_.substr(pos_, end - pos_));
        pos_ = end;
        if (token == "true") return {true};
        if (token == "false") return {false};
        std::string digits;
        for (char c : token)
            if (c != '_') digits += c;
        if (digits == "inf" || digits == "+inf" || digits == "-inf" || digits == "nan")
            parse_fail(where_, "non-finite number '" + token + "'");
        const bool is_float = digits.find_first_of(".eE") != std::string::npos;
        const char* first = digits.data() + (digits.size() > 0 && digits[0] == '+' ? 1 : 0);
        const char* last = digits.data() + digits.size();
        if (is_float) {
            double d = 0.0;
            const auto res = std::from_chars(first, last, d);
            if (res.ec != std::errc() || res.ptr != last) parse_fail(where_, "invalid number '" + token + "'");
            return {d};
        }
        std::int64_t i = 0;
        const auto res = std::from_chars(first, last, i);
        if (res.ec != std::errc() || res.ptr != last || first == last)
            parse_fail(where_, "invalid value '" + token + "' (strings need double quotes)");
        return {i};
    }

    std::string_view text_;
    std::string where_;
    std::size_t pos_ = 0;
};

std::string where_of(const std::string& key, const ConfigValue& v)
{
    return v.line > 0 ? "line " + std::to_string(v.line) + ", key '" + key + "'" : "key '" + key + "'";
}

std::string display(const ConfigValue& v)
{
    struct Visitor {
        std::string operator()(bool b) const { return b ? "true" : "false"; }
        std::string operator()(std::int64_t i) const { return std::to_string(i); }
        std::string operator()(double d) const
        {
            std::ostringstream out;
            out.precision(17);
            out << d;
            return out.str();
        }
        std::string operator()(const std::string& s) const { return "\"" + s + "\""; }
        std::string operator()(const ConfigValue::Array& a) const
        {
            std::string out = "[";
            for (std::size_t i = 0; i < a.size(); ++i) out += (i ? ", " : "") + display(a[i]);
            return out + "]";
        }
    };
    return std::visit(Visitor{}, v.value);
}

std::string env_name(const std::string& key)
{
    std::string name = "SEQRC_";
    for (char c : key) name += (c == '.' || c == '-') ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return name;
}

ModelSpec make_model(const std::string& kind, const std::string& where)
{
    if (kind == "rc" || kind == "single") return ReservoirSpec{0, 256, {}};
    if (kind == "seqrc" || kind == "sequential") return SequentialSpec{0, 8, 32, {}};
    throw Error(ErrorCode::InvalidSpec, where + ": model kind must be \"rc\" or \"seqrc\", got \"" + kind + "\"");
}

}  // namespace

// --- values ----------------------------------------------------------------

double ConfigValue::as_double(const std::string& key) const
{
    if (const auto* d = std::get_if<double>(&value)) return *d;
    if (const auto* i = std::get_if<std::int64_t>(&value)) return static_cast<double>(*i);
    throw Error(ErrorCode::ParseError, where_of(key, *this) + ": expected a number");
}

std::int64_t ConfigValue::as_int(const std::string& key) const
{
    if (const auto* i = std::get_if<std::int64_t>(&value)) return *i;
    throw Error(ErrorCode::ParseError, where_of(key, *this) + ": expected an integer");
}

bool ConfigValue::as_bool(const std::string& key) const
{
    if (const auto* b = std::get_if<bool>(&value)) return *b;
    throw Error(ErrorCode::ParseError, where_of(key, *this) + ": expected true or false");
}

const std::string& ConfigValue::as_string(const std::string& key) const
{
    if (const auto* s = std::get_if<std::string>(&value)) return *s;
    throw Error(ErrorCode::ParseError, where_of(key, *this) + ": expected a quoted string");
}

const ConfigValue::Array& ConfigValue::as_array(const std::string& key) const
{
    if (const auto* a = std::get_if<Array>(&value)) return *a;
    throw Error(ErrorCode::ParseError, where_of(key, *this) + ": expected an array");
}

ConfigValue parse_config_value(const std::string& text, const std::string& where)
{
    return ValueParser(text, where).parse_all();
}

// --- documents -------------------------------------------------------------

ConfigDocument ConfigDocument::parse(const std::string& text, const std::string& source)
{
    ConfigDocument doc;
    doc.source = source;
    std::istringstream in(text);
    std::string raw;
    std::string table;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::size_t start_line = line_no;
        const std::string where = source + ":" + std::to_string(start_line);
        std::string line = raw;
        if (const auto c = comment_start(line); c != std::string::npos) line.erase(c);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.size() < 3 || line.back() != ']' || line[1] == '[')
                parse_fail(where, "malformed table header '" + line + "'");
            table = trim(std::string_view(line).substr(1, line.size() - 2));
            if (!valid_bare_key(table)) parse_fail(where, "invalid table name '" + table + "'");
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos) parse_fail(where, "expected 'key = value'");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        if (!valid_bare_key(key)) parse_fail(where, "invalid key '" + key + "'");
        std::string value_text = trim(std::string_view(line).substr(eq + 1));
        while (bracket_balance(value_text) > 0 && std::getline(in, raw)) {
            ++line_no;
            if (const auto c = comment_start(raw); c != std::string::npos) raw.erase(c);
            value_text += " " + trim(raw);
        }
        const std::string full = table.empty() ? key : table + "." + key;
        ConfigValue value = ValueParser(value_text, where + ", key '" + full + "'").parse_all();
        value.line = start_line;
        if (!doc.entries.emplace(full, std::move(value)).second) parse_fail(where, "duplicate key '" + full + "'");
    }
    return doc;
}

ConfigDocument ConfigDocument::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path.string());
}

const ConfigValue* ConfigDocument::find(const std::string& key) const
{
    const auto it = entries.find(key);
    return it == entries.end() ? nullptr : &it->second;
}

// --- experiment schema -----------------------------------------------------

const char* to_string(DatasetKind kind)
{
    switch (kind) {
    case DatasetKind::lorenz63: return "lorenz63";
    case DatasetKind::shallow_water: return "shallow_water";
    case DatasetKind::vorticity: return "vorticity";
    case DatasetKind::file: return "file";
    }
    return "unknown";
}

Index ExperimentConfig::warmup() const
{
    return split.warmup >= 0 ? split.warmup : std::max<Index>(train.washout, 1);
}

Index ExperimentConfig::required_length() const
{
    return split.n_train + split.gap + warmup() + split.horizon;
}

void ExperimentConfig::validate() const
{
    if (dataset.kind == DatasetKind::file) {
        if (dataset.path.empty()) throw Error(ErrorCode::MissingRequired, "dataset.path is required for file input");
        if (!std::filesystem::exists(dataset.path))
            throw Error(ErrorCode::InvalidSpec, "dataset.path " + dataset.path.string() + " does not exist");
    } else {
        seqrc::validate(model);
    }
    params_of(model).validate();
    switch (dataset.kind) {
    case DatasetKind::lorenz63: dataset.lorenz.validate(); break;
    case DatasetKind::shallow_water: dataset.swe.validate(); break;
    case DatasetKind::vorticity: dataset.vorticity.validate(); break;
    case DatasetKind::file: break;
    }
    if (train.washout < 0) throw Error(ErrorCode::InvalidSpec, "model.washout must be >= 0");
    if (!(train.regularization >= 0.0)) throw Error(ErrorCode::InvalidSpec, "model.regularization must be >= 0");
    if (split.n_train < train.washout + 2)
        throw Error(ErrorCode::InvalidSpec, "split.n_train must exceed model.washout + 1");
    if (split.gap < 0 || split.horizon < 0) throw Error(ErrorCode::InvalidSpec, "split.gap and split.horizon must be >= 0");
    if (warmup() < std::max<Index>(train.washout, 1))
        throw Error(ErrorCode::InvalidSpec, "split.warmup must be at least the washout");
    if (!(metrics.vpt_threshold > 0.0)) throw Error(ErrorCode::InvalidSpec, "metrics.vpt_threshold must be positive");
    if (metrics.dynamic_range < 0.0) throw Error(ErrorCode::InvalidSpec, "metrics.dynamic_range must be >= 0");
    for (Index lead : metrics.snapshot_leads)
        if (lead < 1) throw Error(ErrorCode::InvalidSpec, "metrics.snapshot_leads entries must be >= 1");
    if (run.seeds.empty()) throw Error(ErrorCode::InvalidSpec, "run.seeds must not be empty");
    if (run.jobs < 1) throw Error(ErrorCode::InvalidSpec, "run.jobs must be >= 1");
}

namespace {

using Setter = std::function<void(ExperimentConfig&, const ConfigValue&, const std::string&)>;

Index to_index(const ConfigValue& v, const std::string& key)
{
    return static_cast<Index>(v.as_int(key));
}

std::vector<std::pair<std::string, Setter>> schema()
{
    std::vector<std::pair<std::string, Setter>> s;
    auto dbl = [&](std::string key, std::function<double&(ExperimentConfig&)> ref) {
        s.emplace_back(std::move(key), [ref](ExperimentConfig& c, const ConfigValue& v, const std::string& k) {
            ref(c) = v.as_double(k);
        });
    };
    auto idx = [&](std::string key, std::function<Index&(ExperimentConfig&)> ref) {
        s.emplace_back(std::move(key), [ref](ExperimentConfig& c, const ConfigValue& v, const std::string& k) {
            ref(c) = to_index(v, k);
        });
    };
    auto flag = [&](std::string key, std::function<bool&(ExperimentConfig&)> ref) {
        s.emplace_back(std::move(key), [ref](ExperimentConfig& c, const ConfigValue& v, const std::string& k) {
            ref(c) = v.as_bool(k);
        });
    };
    auto params = [](ExperimentConfig& c) -> ReservoirParams& { return params_of(c.model); };

    // dataset
    s.emplace_back("dataset.path", [](ExperimentConfig& c, const ConfigValue& v, const std::string& k) {
        c.dataset.path = v.as_string(k);
    });
    dbl("dataset.dt", [](ExperimentConfig& c) -> double& { return c.dataset.file_dt; });
    idx("dataset.seed_discard_span", [](ExperimentConfig& c) -> Index& { return c.dataset.seed_discard_span; });

    dbl("dataset.lorenz63.sigma", [](ExperimentConfig& c) -> double& { return c.dataset.lorenz.sigma; });
    dbl("dataset.lorenz63.rho", [](ExperimentConfig& c) -> double& { return c.dataset.lorenz.rho; });
    dbl("dataset.lorenz63.beta", [](ExperimentConfig& c) -> double& { return c.dataset.lorenz.beta; });
    dbl("dataset.lorenz63.dt", [](ExperimentConfig& c) -> double& { return c.dataset.lorenz.dt; });
    idx("dataset.lorenz63.discard", [](ExperimentConfig& c) -> Index& { return c.dataset.lorenz.discard; });
    s.emplace_back("dataset.lorenz63.initial", [](ExperimentConfig& c, const ConfigValue& v, const std::string& k) {
        const auto& a = v.as_array(k);
        if (a.size() != 3) throw Error(ErrorCode::InvalidSpec, where_of(k, v) + ": expected three values");
        for (std::size_t i = 0; i < 3; ++i) c.dataset.lorenz.initial[i] = a[i].as_double(k);
    });

    dbl("dataset.shallow_water.lx", [](ExperimentConfig& c) -> double& { return c.dataset.swe.lx; });
    dbl("dataset.shallow_water.ly", [](ExperimentConfig& c) -> double& { return c.dataset.swe.ly; });
    idx("dataset.shallow_water.nx", [](ExperimentConfig& c) -> Index& { return c.dataset.swe.nx; });
    idx("dataset.shallow_water.ny", [](ExperimentConfig& c) -> Index& { return c.dataset.swe.ny; });
    dbl("dataset.shallow_water.gravity", [](ExperimentConfig& c) -> double& { return c.dataset.swe.gravity; });
    dbl("dataset.shallow_water.depth", [](ExperimentConfig& c) -> double& { return c.dataset.swe.depth; });
    dbl("dataset.shallow_water.f0", [](ExperimentConfig& c) -> double& { return c.dataset.swe.f0; });
    dbl("dataset.shallow_water.beta", [](ExperimentConfig& c) -> double& { return c.dataset.swe.beta; });
    dbl("dataset.shallow_water.friction", [](ExperimentConfig& c) -> double& { return c.dataset.swe.friction; });
    dbl("dataset.shallow_water.tau_x", [](ExperimentConfig& c) -> double& { return c.dataset.swe.tau_x; });
    dbl("dataset.shallow_water.tau_y", [](ExperimentConfig& c) -> double& { return c.dataset.swe.tau_y; });
    dbl("dataset.shallow_water.rho0", [](ExperimentConfig& c) -> double& { return c.dataset.swe.rho0; });
    dbl("dataset.shallow_water.source", [](ExperimentConfig& c) -> double& { return c.dataset.swe.source; });
    dbl("dataset.shallow_water.w_vert", [](ExperimentConfig& c) -> double& { return c.dataset.swe.w_vert; });
    dbl("dataset.shallow_water.dt", [](ExperimentConfig& c) -> double& { return c.dataset.swe.dt; });
    dbl("dataset.shallow_water.cfl_fraction", [](ExperimentConfig& c) -> double& { return c.dataset.swe.cfl_fraction; });
    idx("dataset.shallow_water.output_stride", [](ExperimentConfig& c) -> Index& { return c.dataset.swe.output_stride; });
    flag("dataset.shallow_water.include_velocity",
         [](ExperimentConfig& c) -> bool& { return c.dataset.swe.include_velocity; });
    dbl("dataset.shallow_water.bump_amplitude", [](ExperimentConfig& c) -> double& { return c.dataset.bump.amplitude; });
    dbl("dataset.shallow_water.bump_x", [](ExperimentConfig& c) -> double& { return c.dataset.bump.center_x; });
    dbl("dataset.shallow_water.bump_y", [](ExperimentConfig& c) -> double& { return c.dataset.bump.center_y; });
    dbl("dataset.shallow_water.bump_width", [](ExperimentConfig& c) -> double& { return c.dataset.bump.width; });

    idx("dataset.vorticity.n", [](ExperimentConfig& c) -> Index& { return c.dataset.vorticity.n; });
    dbl("dataset.vorticity.reynolds", [](ExperimentConfig& c) -> double& { return c.dataset.vorticity.reynolds; });
    dbl("dataset.vorticity.dt", [](ExperimentConfig& c) -> double& { return c.dataset.vorticity.dt; });
    idx("dataset.vorticity.output_stride", [](ExperimentConfig& c) -> Index& { return c.dataset.vorticity.output_stride; });
    idx("dataset.vorticity.spinup_steps", [](ExperimentConfig& c) -> Index& { return c.dataset.vorticity.spinup_steps; });
    flag("dataset.vorticity.forcing", [](ExperimentConfig& c) -> bool& { return c.dataset.vorticity.forcing; });
    dbl("dataset.vorticity.max_courant", [](ExperimentConfig& c) -> double& { return c.dataset.vorticity.max_courant; });
    s.emplace_back("dataset.vorticity.grf_seed", [](ExperimentConfig& c, const ConfigValue& v, const std::string& k) {
        c.dataset.vorticity.grf_seed = static_cast<std::uint64_t>(v.as_int(k));
    });

    // model
    s.emplace_back("model.reservoir_size", [](ExperimentConfig& c, const ConfigValue& v, const std::string& k) {
        auto* spec = std::get_if<ReservoirSpec>(&c.model);
        if (spec == nullptr) throw Error(ErrorCode::InvalidSpec, where_of(k, v) + ": only valid for kind = \"rc\"");
        spec->reservoir_size = to_index(v, k);
    });
    s.emplace_back("model.layer_count", [](ExperimentConfig& c, const ConfigValue& v, const std::string& k) {
        auto* spec = std::get_if<SequentialSpec>(&c.model);
        if (spec == nullptr) throw Error(ErrorCode::InvalidSpec, where_of(k, v) + ": only valid for kind = \"seqrc\"");
        spec->layer_count = to_index(v, k);
    });
    s.emplace_back("model.layer_size", [](ExperimentConfig& c, const ConfigValue& v, const std::string& k) {
        auto* spec = std::get_if<SequentialSpec>(&c.model);
        if (spec == nullptr) throw Error(ErrorCode::InvalidSpec, where_of(k, v) + ": only valid for kind = \"seqrc\"");
        spec->layer_size = to_index(v, k);
    });
    dbl("model.spectral_radius", [params](ExperimentConfig& c) -> double& { return params(c).spectral_radius; });
    dbl("model.leak_rate", [params](ExperimentConfig& c) -> double& { return params(c).leak_rate; });
    dbl("model.sparsity", [params](ExperimentConfig& c) -> double& { return params(c).sparsity; });
    dbl("model.input_scale", [params](ExperimentConfig& c) -> double& { return params(c).input_scale; });
    s.emplace_back("model.activation", [params](ExperimentConfig& c, const ConfigValue& v, const std::string& k) {
        const auto& name = v.as_string(k);
        if (name == "tanh")
            params(c).activation = Activation::tanh;
        else if (name == "identity")
            params(c).activation = Activation::identity;
        else
            throw Error(ErrorCode::InvalidSpec, where_of(k, v) + ": activation must be \"tanh\" or \"identity\"");
    });
    s.emplace_back("model.normalization", [](ExperimentConfig& c, const ConfigValue& v, const std::string& k) {
        const auto& mode = v.as_string(k);
        if (mode == "scale")
            c.train.normalization = NormalizationMode::scale;
        else if (mode == "zscore")
            c.train.normalization = NormalizationMode::zscore;
        else
            throw Error(ErrorCode::InvalidSpec, where_of(k, v) + ": normalization must be \"scale\" or \"zscore\"");
    });
    idx("model.washout", [](ExperimentConfig& c) -> Index& { return c.train.washout; });
    dbl("model.regularization", [](ExperimentConfig& c) -> double& { return c.train.regularization; });
    idx("model.chunk_rows", [](ExperimentConfig& c) -> Index& { return c.train.chunk_rows; });

    // split
    idx("split.n_train", [](ExperimentConfig& c) -> Index& { return c.split.n_train; });
    idx("split.gap", [](ExperimentConfig& c) -> Index& { return c.split.gap; });
    idx("split.warmup", [](ExperimentConfig& c) -> Index& { return c.split.warmup; });
    idx("split.horizon", [](ExperimentConfig& c) -> Index& { return c.split.horizon; });

    // metrics
    dbl("metrics.vpt_threshold", [](ExperimentConfig& c) -> double& { return c.metrics.vpt_threshold; });
    dbl("metrics.ssim_threshold", [](ExperimentConfig& c) -> double& { return c.metrics.ssim_threshold; });
    dbl("metrics.dynamic_range", [](ExperimentConfig& c) -> double& { return c.metrics.dynamic_range; });
    idx("metrics.ssim_window", [](ExperimentConfig& c) -> Index& { return c.metrics.ssim.window; });
    dbl("metrics.ssim_sigma", [](ExperimentConfig& c) -> double& { return c.metrics.ssim.sigma; });
    s.emplace_back("metrics.ssim_mode", [](ExperimentConfig& c, const ConfigValue& v, const std::string& k) {
        const auto& mode = v.as_string(k);
        if (mode == "window")
            c.metrics.ssim.mode = SsimMode::gaussian_window;
        else if (mode == "global")
            c.metrics.ssim.mode = SsimMode::global;
        else
            throw Error(ErrorCode::InvalidSpec, where_of(k, v) + ": ssim_mode must be \"window\" or \"global\"");
    });
    s.emplace_back("metrics.snapshot_leads", [](ExperimentConfig& c, const ConfigValue& v, const std::string& k) {
        c.metrics.snapshot_leads.clear();
        for (const auto& item : v.as_array(k)) c.metrics.snapshot_leads.push_back(to_index(item, k));
    });

    // run
    s.emplace_back("run.seeds", [](ExperimentConfig& c, const ConfigValue& v, const std::string& k) {
        c.run.seeds.clear();
        for (const auto& item : v.as_array(k)) {
            const auto seed = item.as_int(k);
            if (seed < 0) throw Error(ErrorCode::InvalidSpec, where_of(k, v) + ": seeds must be non-negative");
            c.run.seeds.push_back(static_cast<std::uint64_t>(seed));
        }
    });
    s.emplace_back("run.output_dir", [](ExperimentConfig& c, const ConfigValue& v, const std::string& k) {
        c.run.output_dir = v.as_string(k);
    });
    idx("run.jobs", [](ExperimentConfig& c) -> Index& { return c.run.jobs; });
    return s;
}

}  // namespace

ExperimentConfig parse_config(const ConfigDocument& input, bool apply_environment)
{
    static const std::vector<std::string> kRequired = {"dataset.generator", "model.kind", "split.n_train",
                                                       "split.horizon"};
    static const std::vector<std::string> kSpecial = {"dataset.generator", "model.kind", "dataset.lorenz63.reading"};
    const auto fields = schema();

    ConfigDocument doc = input;
    if (apply_environment) {
        auto apply_env = [&](const std::string& key) {
            const std::string name = env_name(key);
            if (const char* value = std::getenv(name.c_str())) {
                // Unquoted text that is not a literal is taken as a string.
                ConfigValue v;
                try {
                    v = parse_config_value(value, "environment " + name);
                } catch (const Error& e) {
                    if (e.code() != ErrorCode::ParseError) throw;
                    v.value = std::string(value);
                }
                doc.entries[key] = std::move(v);
            }
        };
        for (const auto& key : kSpecial) apply_env(key);
        for (const auto& [key, setter] : fields) apply_env(key);
    }

    for (const auto& [key, value] : doc.entries) {
        const bool known = std::find(kSpecial.begin(), kSpecial.end(), key) != kSpecial.end() ||
                           std::any_of(fields.begin(), fields.end(), [&](const auto& f) { return f.first == key; });
        if (!known) throw Error(ErrorCode::UnknownKey, doc.source + ": " + where_of(key, value) + " is not a recognized setting");
    }
    for (const auto& key : kRequired)
        if (doc.find(key) == nullptr) throw Error(ErrorCode::MissingRequired, doc.source + ": missing required key '" + key + "'");

    ExperimentConfig config;
    const auto& generator = *doc.find("dataset.generator");
    const std::string gen = generator.as_string("dataset.generator");
    if (gen == "lorenz63")
        config.dataset.kind = DatasetKind::lorenz63;
    else if (gen == "shallow_water")
        config.dataset.kind = DatasetKind::shallow_water;
    else if (gen == "vorticity")
        config.dataset.kind = DatasetKind::vorticity;
    else if (gen == "file")
        config.dataset.kind = DatasetKind::file;
    else
        throw Error(ErrorCode::InvalidSpec, where_of("dataset.generator", generator) +
                                                ": expected lorenz63, shallow_water, vorticity or file");

    const auto& kind = *doc.find("model.kind");
    config.model = make_model(kind.as_string("model.kind"), where_of("model.kind", kind));

    if (const auto* reading = doc.find("dataset.lorenz63.reading")) {
        const auto& mode = reading->as_string("dataset.lorenz63.reading");
        if (mode == "parameters")
            config.dataset.lorenz = Lorenz63Params::literal_parameter_reading();
        else if (mode != "initial_state")
            throw Error(ErrorCode::InvalidSpec, where_of("dataset.lorenz63.reading", *reading) +
                                                    ": expected \"initial_state\" or \"parameters\"");
    }

    for (const auto& [key, setter] : fields)
        if (const auto* v = doc.find(key)) setter(config, *v, key);

    Index input_dim = 0;
    switch (config.dataset.kind) {
    case DatasetKind::lorenz63: input_dim = 3; break;
    case DatasetKind::shallow_water:
        input_dim = config.dataset.swe.nx * config.dataset.swe.ny * (config.dataset.swe.include_velocity ? 3 : 1);
        break;
    case DatasetKind::vorticity: input_dim = config.dataset.vorticity.n * config.dataset.vorticity.n; break;
    case DatasetKind::file: break;
    }
    std::visit([&](auto& spec) { spec.input_dim = input_dim; }, config.model);

    for (const auto& [key, value] : doc.entries) config.resolved[key] = display(value);
    config.validate();
    return config;
}

ExperimentConfig parse_config(const std::filesystem::path& path, bool apply_environment)
{
    return parse_config(ConfigDocument::load(path), apply_environment);
}

}  // namespace seqrc
