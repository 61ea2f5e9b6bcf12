#include "stakepool/scenario.hpp"

#include "stakepool/errors.hpp"

#include <json.hpp>

#include <set>

namespace stakepool {

namespace {

using nlohmann::json;

std::string location(std::string_view text, std::size_t byte) {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

Scalar read_number(const json& j, const std::string& field, bool floating) {
    if (j.is_number_integer()) {
        if (j.is_number_unsigned()) return Scalar(Rational(j.get<std::uint64_t>()));
        return Scalar(Rational(j.get<std::int64_t>()));
    }
    if (j.is_number_float()) {
        double v = j.get<double>();
        return floating ? Scalar::real(v) : decimal_from_double(v);
    }
    if (j.is_string()) {
        Scalar s = parse_scalar(j.get<std::string>());
        return floating ? Scalar::real(s.to_double()) : s;
    }
    throw InputError("field '" + field + "' must be a number");
}

json write_number(const Scalar& s) {
    if (!s.is_exact()) return s.to_double();
    if (s.is_integer()) {
        const BigInt& n = boost::multiprecision::numerator(s.exact());
        if (n >= std::numeric_limits<std::int64_t>::min() && n <= std::numeric_limits<std::int64_t>::max())
            return n.convert_to<std::int64_t>();
        return n.str();
    }
    double d = s.to_double();
    if (decimal_from_double(d) == s) return d;
    return s.str();
}

}  // namespace

Scenario parse_scenario(std::string_view text, double tolerance) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw InputError("syntax error at " + location(text, e.byte) + ": " + e.what());
    }
    if (!doc.is_object()) throw InputError("scenario must be a JSON object");
    static const std::set<std::string> known{"threshold", "atomic_stakes", "oceanic_mass",
                                             "scheme",    "partition",     "arithmetic"};
    for (const auto& [key, _] : doc.items())
        if (!known.count(key)) throw InputError("unknown field '" + key + "'");

    bool floating = false;
    if (doc.contains("arithmetic")) {
        const auto& a = doc["arithmetic"];
        if (a == "float") floating = true;
        else if (a != "exact") throw InputError("field 'arithmetic' must be \"exact\" or \"float\"");
    }
    if (!doc.contains("threshold")) throw InputError("missing field 'threshold'");
    Scalar h = read_number(doc["threshold"], "threshold", floating);

    std::vector<Scalar> stakes;
    if (doc.contains("atomic_stakes")) {
        if (!doc["atomic_stakes"].is_array()) throw InputError("field 'atomic_stakes' must be an array");
        for (const auto& v : doc["atomic_stakes"]) stakes.push_back(read_number(v, "atomic_stakes", floating));
    }
    Scalar ocean = doc.contains("oceanic_mass") ? read_number(doc["oceanic_mass"], "oceanic_mass", floating)
                                                : Scalar(0);
    if (floating) {
        h = Scalar::real(h.to_double());
        ocean = Scalar::real(ocean.to_double());
    }
    Scenario scenario{GameSpec(h, std::move(stakes), ocean, tolerance), std::nullopt, std::nullopt};

    if (doc.contains("scheme")) {
        if (!doc["scheme"].is_string()) throw InputError("field 'scheme' must be a string");
        scenario.scheme = parse_scheme(doc["scheme"].get<std::string>());
    }
    if (doc.contains("partition")) {
        const auto& pools = doc["partition"];
        if (!pools.is_array()) throw InputError("field 'partition' must be an array of pools");
        Partition partition;
        for (const auto& p : pools) {
            if (!p.is_object()) throw InputError("each pool must be an object");
            Pool pool;
            if (p.contains("atomic")) {
                if (!p["atomic"].is_array()) throw InputError("pool field 'atomic' must be an array");
                for (const auto& id : p["atomic"]) {
                    if (!id.is_number_integer() || id.get<std::int64_t>() < 1)
                        throw InputError("player ids must be positive integers");
                    pool.atomic.push_back(static_cast<PlayerId>(id.get<std::int64_t>() - 1));
                }
            }
            pool.oceanic = p.contains("oceanic") ? read_number(p["oceanic"], "oceanic", floating) : Scalar(0);
            if (floating) pool.oceanic = Scalar::real(pool.oceanic.to_double());
            partition.pools.push_back(std::move(pool));
        }
        require_valid(partition, scenario.game);
        scenario.partition = std::move(partition);
    }
    return scenario;
}

std::string serialize_scenario(const Scenario& scenario) {
    const GameSpec& g = scenario.game;
    json doc = json::object();
    doc["threshold"] = write_number(g.threshold());
    json stakes = json::array();
    for (const auto& a : g.stakes()) stakes.push_back(write_number(a));
    doc["atomic_stakes"] = stakes;
    doc["oceanic_mass"] = write_number(g.oceanic_mass());
    if (g.arithmetic() == Arithmetic::floating) doc["arithmetic"] = "float";
    if (scenario.scheme) doc["scheme"] = std::string(to_string(*scenario.scheme));
    if (scenario.partition) {
        json pools = json::array();
        for (const auto& pool : scenario.partition->pools) {
            json ids = json::array();
            for (PlayerId i : pool.atomic) ids.push_back(i + 1);
            pools.push_back({{"atomic", ids}, {"oceanic", write_number(pool.oceanic)}});
        }
        doc["partition"] = pools;
    }
    return doc.dump(2) + "\n";
}

}  // namespace stakepool
