#include "mgsim/netchan.hpp"

#include <algorithm>
#include <string>

namespace mgsim {

namespace {
// time-grid comparisons tolerate representation error well below one control period
constexpr double kTimeEps = 1e-9;
}  // namespace

void ChannelParams::validate() const {
    if (!(rate_hz > 0.0)) throw ConfigError("chan.rate_hz must be positive");
    if (!(delay_s >= 0.0)) throw ConfigError("chan.delay_s must be >= 0");
    if (!(jitter_s >= 0.0)) throw ConfigError("chan.jitter_s must be >= 0");
    if (jitter_s > delay_s && jitter_s > 0.0)
        throw ConfigError("chan.jitter_s must not exceed chan.delay_s");
    if (!(loss_prob >= 0.0 && loss_prob <= 1.0))
        throw ConfigError("chan.loss_prob must be in [0, 1], got " + std::to_string(loss_prob));
}

Channel::Channel(const ChannelParams& p, int sender_id)
    : p_(p), sender_(sender_id), rng_(p.seed) {
    p_.validate();
}

std::optional<QShareMessage> Channel::tick_send(double t_now, double q_value) {
    const double due = static_cast<double>(next_slot_) / p_.rate_hz;
    if (t_now + kTimeEps < due) return std::nullopt;
    ++next_slot_;

    QShareMessage msg{sender_, next_seq_++, t_now, q_value};
    ++stats_.sent;

    // the loss draw happens whether or not the message survives, so the random
    // stream consumed per send is fixed and runs reproduce exactly
    const bool lost = rng_.bernoulli(p_.loss_prob);
    double jitter = 0.0;
    if (p_.jitter_s > 0.0) jitter = rng_.uniform(-p_.jitter_s, p_.jitter_s);
    if (lost) {
        ++stats_.dropped;
        return msg;
    }

    InFlight f{msg, t_now + p_.delay_s + jitter};
    auto pos = std::upper_bound(queue_.begin(), queue_.end(), f, [](const InFlight& a, const InFlight& b) {
        if (a.t_deliver != b.t_deliver) return a.t_deliver < b.t_deliver;
        return a.msg.seq < b.msg.seq;
    });
    queue_.insert(pos, f);
    return msg;
}

std::vector<QShareMessage> Channel::deliver_due(double t_now) {
    std::vector<QShareMessage> out;
    std::size_t k = 0;
    while (k < queue_.size() && queue_[k].t_deliver <= t_now + kTimeEps) ++k;
    if (k == 0) return out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) out.push_back(queue_[i].msg);
    queue_.erase(queue_.begin(), queue_.begin() + static_cast<std::ptrdiff_t>(k));
    stats_.delivered += out.size();
    return out;
}

}  // namespace mgsim
