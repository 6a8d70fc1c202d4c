#include <cmath>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "drsyn/dynamics.hpp"
#include "drsyn/error.hpp"

namespace drsyn {

namespace {

using std::cos;
using std::sin;

template <class T>
std::vector<T> lift(std::span<const double> v) {
    return std::vector<T>(v.begin(), v.end());
}

std::string fmt_double(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

void require_inputs(const std::vector<Vec>& inputs, std::size_t dim, const char* who) {
    if (inputs.empty()) throw InvalidInput(std::string(who) + ": at least one input is required");
    for (const auto& u : inputs)
        if (u.size() != dim) throw InvalidInput(std::string(who) + ": input dimension mismatch");
}

// --- additive ---------------------------------------------------------------

template <class T>
std::vector<T> additive_eval(const AdditiveParams& p, const std::vector<T>& x, std::size_t a, const std::vector<T>& w) {
    std::vector<T> out(p.dim);
    for (std::size_t i = 0; i < p.dim; ++i) out[i] = x[i] + T(p.inputs[a][i]) + T(p.gain) * w[i];
    return out;
}

// --- multiplicative ----------------------------------------------------------

template <class T>
std::vector<T> mult_eval(const MultiplicativeParams& p, const std::vector<T>& x, std::size_t a,
                         const std::vector<T>& w) {
    std::vector<T> out(p.dim);
    for (std::size_t i = 0; i < p.dim; ++i) out[i] = x[i] * w[i] + T(p.inputs[a][i]);
    return out;
}

// --- pendulum ----------------------------------------------------------------

template <class T>
std::vector<T> pendulum_eval(const PendulumParams& p, const std::vector<T>& x, std::size_t a, const std::vector<T>& w) {
    const double inertia = p.mass * p.length * p.length;
    const T& theta = x[0];
    const T& omega = x[1];
    const T v = omega - w[0] * cos(theta);
    const T accel = T(-p.gravity / p.length) * sin(theta) + T(p.torques[a] / inertia) -
                    T(p.drag / inertia) * signed_square(v);
    return {theta + T(p.dt) * omega, omega + T(p.dt) * accel};
}

// --- unicycles ---------------------------------------------------------------

double heading(const Unicycle2dParams& p, std::size_t a) {
    return 2.0 * std::numbers::pi * static_cast<double>(a) / static_cast<double>(p.headings);
}

template <class T>
std::vector<T> uni2_eval(const Unicycle2dParams& p, const std::vector<T>& x, std::size_t a, const std::vector<T>& w) {
    const double h = heading(p, a);
    return {x[0] + T(p.dt * p.speed * std::cos(h)) + w[0], x[1] + T(p.dt * p.speed * std::sin(h)) + w[1]};
}

std::pair<double, double> uni3_mode(const Unicycle3dParams& p, std::size_t a) {
    return {p.speeds[a / p.turn_rates.size()], p.turn_rates[a % p.turn_rates.size()]};
}

template <class T>
std::vector<T> uni3_eval(const Unicycle3dParams& p, const std::vector<T>& x, std::size_t a, const std::vector<T>& w) {
    const auto [v, om] = uni3_mode(p, a);
    const T speed = T(v) + w[0];
    return {x[0] + T(p.dt) * speed * cos(x[2]), x[1] + T(p.dt) * speed * sin(x[2]), x[2] + T(p.dt * om)};
}

template <class Eval>
SystemModel::StepFn make_step(Eval eval) {
    return [eval](std::span<const double> x, std::size_t a, std::span<const double> w) {
        return eval(lift<double>(x), a, lift<double>(w));
    };
}

Box box_from_json(const nlohmann::json& j) {
    return Box(j.at("lower").get<Vec>(), j.at("upper").get<Vec>());
}

}  // namespace

SystemModel make_additive(const AdditiveParams& p) {
    if (p.dim == 0) throw InvalidInput("additive: dimension must be >= 1");
    require_inputs(p.inputs, p.dim, "additive");
    if (p.noise.dim() != p.dim) throw InvalidInput("additive: noise dimension must equal the state dimension");
    SystemModel m;
    m.name = "additive";
    m.state_dim = p.dim;
    m.noise_dim = p.dim;
    for (std::size_t a = 0; a < p.inputs.size(); ++a) m.modes.push_back("u" + std::to_string(a));
    m.noise_support = p.noise;
    m.step_fn = make_step([p](const Vec& x, std::size_t a, const Vec& w) { return additive_eval<double>(p, x, a, w); });
    IntervalExtension ext;
    ext.eval = [p](const IntervalVec& x, std::size_t a, const IntervalVec& w) { return additive_eval<Interval>(p, x, a, w); };
    ext.jac_x = [p](const IntervalVec&, std::size_t, const IntervalVec&) {
        IntervalMatrix j(p.dim, p.dim);
        for (std::size_t i = 0; i < p.dim; ++i) j(i, i) = 1.0;
        return j;
    };
    ext.jac_w = [p](const IntervalVec&, std::size_t, const IntervalVec&) {
        IntervalMatrix j(p.dim, p.dim);
        for (std::size_t i = 0; i < p.dim; ++i) j(i, i) = p.gain;
        return j;
    };
    attach_interval_extension(m, ext);
    if (p.gain != 0.0) {
        m.inverse_fn = [p](std::span<const double> x, std::size_t a, std::span<const double> xn) -> std::optional<Vec> {
            Vec w(p.dim);
            for (std::size_t i = 0; i < p.dim; ++i) w[i] = (xn[i] - x[i] - p.inputs[a][i]) / p.gain;
            return w;
        };
    }
    return m;
}

SystemModel make_multiplicative(const MultiplicativeParams& p) {
    if (p.dim == 0) throw InvalidInput("multiplicative: dimension must be >= 1");
    require_inputs(p.inputs, p.dim, "multiplicative");
    if (p.noise.dim() != p.dim) throw InvalidInput("multiplicative: noise dimension must equal the state dimension");
    SystemModel m;
    m.name = "multiplicative";
    m.state_dim = p.dim;
    m.noise_dim = p.dim;
    for (std::size_t a = 0; a < p.inputs.size(); ++a) m.modes.push_back("u" + std::to_string(a));
    m.noise_support = p.noise;
    m.step_fn = make_step([p](const Vec& x, std::size_t a, const Vec& w) { return mult_eval<double>(p, x, a, w); });
    IntervalExtension ext;
    ext.eval = [p](const IntervalVec& x, std::size_t a, const IntervalVec& w) { return mult_eval<Interval>(p, x, a, w); };
    ext.jac_x = [p](const IntervalVec&, std::size_t, const IntervalVec& w) {
        IntervalMatrix j(p.dim, p.dim);
        for (std::size_t i = 0; i < p.dim; ++i) j(i, i) = w[i];
        return j;
    };
    ext.jac_w = [p](const IntervalVec& x, std::size_t, const IntervalVec&) {
        IntervalMatrix j(p.dim, p.dim);
        for (std::size_t i = 0; i < p.dim; ++i) j(i, i) = x[i];
        return j;
    };
    attach_interval_extension(m, ext);
    m.inverse_fn = [p](std::span<const double> x, std::size_t a, std::span<const double> xn) -> std::optional<Vec> {
        Vec w(p.dim);
        for (std::size_t i = 0; i < p.dim; ++i) {
            if (std::abs(x[i]) < 1e-12) return std::nullopt;
            w[i] = (xn[i] - p.inputs[a][i]) / x[i];
        }
        return w;
    };
    return m;
}

SystemModel make_pendulum(const PendulumParams& p) {
    if (p.torques.empty()) throw InvalidInput("pendulum: at least one torque is required");
    if (!(p.mass > 0 && p.length > 0 && p.dt > 0 && p.drag >= 0))
        throw InvalidInput("pendulum: mass, length and dt must be positive, drag nonnegative");
    if (p.noise.dim() != 1) throw InvalidInput("pendulum: wind noise is one-dimensional");
    SystemModel m;
    m.name = "pendulum";
    m.state_dim = 2;
    m.noise_dim = 1;
    for (double u : p.torques) m.modes.push_back("torque=" + fmt_double(u));
    m.noise_support = p.noise;
    m.step_fn = make_step([p](const Vec& x, std::size_t a, const Vec& w) { return pendulum_eval<double>(p, x, a, w); });
    const double inertia = p.mass * p.length * p.length;
    const double c = p.drag / inertia;
    IntervalExtension ext;
    ext.eval = [p](const IntervalVec& x, std::size_t a, const IntervalVec& w) {
        return pendulum_eval<Interval>(p, x, a, w);
    };
    ext.jac_x = [p, c](const IntervalVec& x, std::size_t, const IntervalVec& w) {
        const Interval v = x[1] - w[0] * cos(x[0]);
        const Interval two_abs_v = Interval(2.0) * abs(v);
        IntervalMatrix j(2, 2);
        j(0, 0) = 1.0;
        j(0, 1) = p.dt;
        // d v / d theta = w sin(theta); d(v|v|)/dv = 2|v|.
        j(1, 0) = Interval(p.dt) * (Interval(-p.gravity / p.length) * cos(x[0]) - Interval(c) * two_abs_v * w[0] * sin(x[0]));
        j(1, 1) = Interval(1.0) - Interval(p.dt * c) * two_abs_v;
        return j;
    };
    ext.jac_w = [p, c](const IntervalVec& x, std::size_t, const IntervalVec& w) {
        const Interval v = x[1] - w[0] * cos(x[0]);
        IntervalMatrix j(2, 1);
        j(0, 0) = 0.0;
        j(1, 0) = Interval(2.0 * p.dt * c) * abs(v) * cos(x[0]);
        return j;
    };
    attach_interval_extension(m, ext);
    if (c > 0) {
        m.inverse_fn = [p, c, inertia](std::span<const double> x, std::size_t a,
                                       std::span<const double> xn) -> std::optional<Vec> {
            const double ct = std::cos(x[0]);
            if (std::abs(ct) < 1e-12) return std::nullopt;
            const double base = x[1] + p.dt * (-p.gravity / p.length * std::sin(x[0]) + p.torques[a] / inertia);
            const double r = (base - xn[1]) / (p.dt * c);
            const double v = std::copysign(std::sqrt(std::abs(r)), r);
            return Vec{(x[1] - v) / ct};
        };
    }
    return m;
}

SystemModel make_unicycle_2d(const Unicycle2dParams& p) {
    if (p.headings < 1) throw InvalidInput("unicycle-2d: headings must be >= 1");
    if (p.noise.dim() != 2) throw InvalidInput("unicycle-2d: noise is two-dimensional");
    SystemModel m;
    m.name = "unicycle-2d";
    m.state_dim = 2;
    m.noise_dim = 2;
    for (int a = 0; a < p.headings; ++a) m.modes.push_back("heading=" + fmt_double(heading(p, a)));
    m.noise_support = p.noise;
    m.step_fn = make_step([p](const Vec& x, std::size_t a, const Vec& w) { return uni2_eval<double>(p, x, a, w); });
    IntervalExtension ext;
    ext.eval = [p](const IntervalVec& x, std::size_t a, const IntervalVec& w) { return uni2_eval<Interval>(p, x, a, w); };
    ext.jac_x = [](const IntervalVec&, std::size_t, const IntervalVec&) {
        IntervalMatrix j(2, 2);
        j(0, 0) = 1.0;
        j(1, 1) = 1.0;
        return j;
    };
    ext.jac_w = ext.jac_x;
    attach_interval_extension(m, ext);
    m.inverse_fn = [p](std::span<const double> x, std::size_t a, std::span<const double> xn) -> std::optional<Vec> {
        const double h = heading(p, a);
        return Vec{xn[0] - x[0] - p.dt * p.speed * std::cos(h), xn[1] - x[1] - p.dt * p.speed * std::sin(h)};
    };
    return m;
}

SystemModel make_unicycle_3d(const Unicycle3dParams& p) {
    if (p.speeds.empty() || p.turn_rates.empty()) throw InvalidInput("unicycle-3d: speeds and turn rates are required");
    if (p.noise.dim() != 1) throw InvalidInput("unicycle-3d: friction noise is one-dimensional");
    SystemModel m;
    m.name = "unicycle-3d";
    m.state_dim = 3;
    m.noise_dim = 1;
    for (double v : p.speeds)
        for (double om : p.turn_rates) m.modes.push_back("v=" + fmt_double(v) + ",omega=" + fmt_double(om));
    m.noise_support = p.noise;
    m.step_fn = make_step([p](const Vec& x, std::size_t a, const Vec& w) { return uni3_eval<double>(p, x, a, w); });
    IntervalExtension ext;
    ext.eval = [p](const IntervalVec& x, std::size_t a, const IntervalVec& w) { return uni3_eval<Interval>(p, x, a, w); };
    ext.jac_x = [p](const IntervalVec& x, std::size_t a, const IntervalVec& w) {
        const Interval speed = Interval(uni3_mode(p, a).first) + w[0];
        IntervalMatrix j(3, 3);
        j(0, 0) = 1.0;
        j(1, 1) = 1.0;
        j(2, 2) = 1.0;
        j(0, 2) = -(Interval(p.dt) * speed * sin(x[2]));
        j(1, 2) = Interval(p.dt) * speed * cos(x[2]);
        return j;
    };
    ext.jac_w = [p](const IntervalVec& x, std::size_t, const IntervalVec&) {
        IntervalMatrix j(3, 1);
        j(0, 0) = Interval(p.dt) * cos(x[2]);
        j(1, 0) = Interval(p.dt) * sin(x[2]);
        j(2, 0) = 0.0;
        return j;
    };
    attach_interval_extension(m, ext);
    m.inverse_fn = [p](std::span<const double> x, std::size_t a, std::span<const double> xn) -> std::optional<Vec> {
        const double v = uni3_mode(p, a).first;
        const double c = std::cos(x[2]), s = std::sin(x[2]);
        if (std::abs(c) >= std::abs(s)) return Vec{(xn[0] - x[0]) / (p.dt * c) - v};
        return Vec{(xn[1] - x[1]) / (p.dt * s) - v};
    };
    return m;
}

SystemModel make_preset(const std::string& name, const nlohmann::json& j) {
    const nlohmann::json params = j.is_null() ? nlohmann::json::object() : j;
    if (name == "additive") {
        AdditiveParams p;
        p.dim = params.value("dim", p.dim);
        if (params.contains("noise")) p.noise = box_from_json(params.at("noise"));
        else if (p.dim != 1) p.noise = Box(Vec(p.dim, -0.05), Vec(p.dim, 0.05));
        if (params.contains("inputs")) p.inputs = params.at("inputs").get<std::vector<Vec>>();
        else if (p.dim != 1) p.inputs = {Vec(p.dim, 0.0)};
        p.gain = params.value("gain", p.gain);
        return make_additive(p);
    }
    if (name == "multiplicative") {
        MultiplicativeParams p;
        p.dim = params.value("dim", p.dim);
        if (params.contains("noise")) p.noise = box_from_json(params.at("noise"));
        else if (p.dim != 1) p.noise = Box(Vec(p.dim, 0.8), Vec(p.dim, 1.0));
        if (params.contains("inputs")) p.inputs = params.at("inputs").get<std::vector<Vec>>();
        else if (p.dim != 1) p.inputs = {Vec(p.dim, 0.0)};
        return make_multiplicative(p);
    }
    if (name == "pendulum") {
        PendulumParams p;
        p.mass = params.value("mass", p.mass);
        p.length = params.value("length", p.length);
        p.gravity = params.value("gravity", p.gravity);
        p.drag = params.value("drag", p.drag);
        p.dt = params.value("dt", p.dt);
        if (params.contains("torques")) p.torques = params.at("torques").get<std::vector<double>>();
        if (params.contains("noise")) p.noise = box_from_json(params.at("noise"));
        return make_pendulum(p);
    }
    if (name == "unicycle-2d") {
        Unicycle2dParams p;
        p.speed = params.value("speed", p.speed);
        p.dt = params.value("dt", p.dt);
        p.headings = params.value("headings", p.headings);
        if (params.contains("noise")) p.noise = box_from_json(params.at("noise"));
        return make_unicycle_2d(p);
    }
    if (name == "unicycle-3d") {
        Unicycle3dParams p;
        p.dt = params.value("dt", p.dt);
        if (params.contains("speeds")) p.speeds = params.at("speeds").get<std::vector<double>>();
        if (params.contains("turn_rates")) p.turn_rates = params.at("turn_rates").get<std::vector<double>>();
        if (params.contains("noise")) p.noise = box_from_json(params.at("noise"));
        return make_unicycle_3d(p);
    }
    throw InvalidInput("unknown system preset '" + name + "'");
}

}  // namespace drsyn
