#include "redplan/churn_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <queue>
#include <random>
#include <stdexcept>
#include <vector>

#include "redplan/errors.hpp"
#include "redplan/reliability.hpp"

namespace redplan::sim {

namespace {

constexpr double kNsPerSecond = 1e9;
constexpr double kSecondsPerDay = 86400.0;
constexpr double kSecondsPerHour = 3600.0;

std::int64_t days_to_ns(double days) {
    return std::llround(days * kSecondsPerDay * kNsPerSecond);
}

std::int64_t hours_to_ns(double hours) {
    return std::llround(hours * kSecondsPerHour * kNsPerSecond);
}

enum EvKind : std::uint32_t {
    kEvDepart = 0,
    kEvArrive = 1,
    kEvToggle = 2,
    kEvXferDone = 3,
    kEvRepairFire = 4,
    kEvSample = 5,
};

// Equal-timestamp ties resolve by kind (departures first, then arrivals,
// toggles, transfer completions, repair firings, samples), then by sequence.
struct Event {
    std::int64_t t;
    std::uint64_t ord;
    std::uint32_t kind;
    std::uint32_t a;
    std::uint64_t b;
};

struct EventLater {
    bool operator()(const Event& x, const Event& y) const {
        if (x.t != y.t) return x.t > y.t;
        return x.ord > y.ord;
    }
};

struct Intent {
    std::uint32_t job;
    std::uint32_t epoch;
    std::uint32_t block;
    std::uint32_t holder;
};

struct QueuedXfer {
    std::uint32_t xfer;
    std::uint32_t gen;
};

struct Node {
    std::int64_t death_ns = 0;
    bool alive = false;
    bool online = false;
    int active_up = 0;
    int active_down = 0;
    std::deque<QueuedXfer> up_q;                          // waiting for our upload slot
    std::deque<Intent> intent_q;                          // waiting for our download slot
    std::vector<std::uint32_t> up_active;                 // transfers we are uploading
    std::vector<std::uint32_t> down_held;                 // transfers holding a download slot
    std::vector<std::uint32_t> jobs;                      // repair jobs assigned here
    std::vector<std::pair<std::uint32_t, std::uint32_t>> blocks;  // (object, block id)
    std::vector<std::pair<std::uint32_t, std::uint32_t>> notify;  // (job, epoch)
    std::uint64_t scratch = ~0ull;  // assignment-scan stamp
};

struct BlockRef {
    std::uint32_t block_id;
    std::uint32_t holder;
};

struct Object {
    std::vector<BlockRef> live;
    std::uint32_t next_block = 0;
    std::vector<std::uint32_t> jobs;
};

enum class XferState : std::uint8_t { Free, WaitUpload, Active };

struct Transfer {
    std::uint32_t job = 0;
    std::uint32_t jepoch = 0;
    std::uint32_t block = 0;
    std::uint32_t src = 0;
    std::uint32_t dst = 0;
    XferState state = XferState::Free;
    std::uint32_t gen = 0;
    std::int64_t start_ns = 0;
};

struct ParkedBlock {
    std::uint32_t block;
    std::uint32_t holder;
};

struct Job {
    std::uint32_t object = 0;
    std::uint32_t repairer = 0;
    std::uint32_t epoch = 0;
    std::int64_t scheduled_ns = 0;
    int restarts = 0;
    int done = 0;
    int outstanding = 0;  // intents plus transfers in flight
    double bytes = 0.0;
    std::uint32_t cursor = 0;  // scan position in the object's live list
    std::vector<ParkedBlock> retry;
    std::vector<ParkedBlock> parked;  // waiting for the holder to come on-line
    bool assigned = false;
    bool in_use = false;
};

class World {
public:
    explicit World(const SimConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {}

    SimResult run();

private:
    // --- configuration-derived constants -------------------------------
    SimConfig cfg_;
    int n_ = 0;
    long long object_total_ = 0;
    double alpha_ = 0, beta_ = 0, gamma_ = 0;
    double theoretical_rho_ = 0;
    std::int64_t end_ns_ = 0, warmup_ns_ = 0, interval_ns_ = 0;
    std::int64_t xfer_dur_ns_ = 0;
    std::int64_t repair_period_ns_ = 0;
    double lifetime_mean_s_ = 0;
    double on_mean_s_ = 0, off_mean_s_ = 0;
    double arrival_mean_s_ = 0;
    bool sessions_ = true;

    // --- world state ----------------------------------------------------
    std::mt19937_64 rng_;
    std::priority_queue<Event, std::vector<Event>, EventLater> queue_;
    std::uint64_t seq_ = 0;
    std::int64_t now_ = 0, last_t_ = 0;
    std::vector<Node> nodes_;
    std::vector<Object> objects_;
    std::vector<Transfer> xfers_;
    std::vector<std::uint32_t> xfer_free_;
    std::vector<Job> jobs_;
    std::vector<std::uint32_t> job_free_;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> unassigned_;  // (job, epoch)
    std::uint64_t stamp_ = 0;

    long long nodes_online_ = 0;
    long long nodes_alive_ = 0;
    long long below_k_ = 0;

    // --- accounting -----------------------------------------------------
    double useful_ = 0, wasted_ = 0, uploaded_ = 0;
    long long restarts_total_ = 0, completed_total_ = 0, loss_events_ = 0;
    std::vector<double> durations_s_;  // post-warmup completions
    double online_integral_ = 0, alive_integral_ = 0;  // node-ns
    double lifetime_drawn_sum_days_ = 0;
    long long lifetime_drawn_count_ = 0;

    struct Snapshot {
        double useful = 0, wasted = 0;
        long long restarts = 0, completed = 0, losses = 0;
        std::size_t durations = 0;
        double online_integral = 0, alive_integral = 0;
    };
    Snapshot warm_, tick_;
    std::vector<TimePoint> series_;

    // --- helpers --------------------------------------------------------
    double uniform() { return (rng_() >> 11) * 0x1.0p-53; }
    double exponential(double mean) { return -mean * std::log1p(-uniform()); }

    void schedule(std::int64_t t, std::uint32_t kind, std::uint32_t a = 0,
                  std::uint64_t b = 0) {
        queue_.push(Event{t, (std::uint64_t(kind) << 56) | seq_++, kind, a, b});
    }

    double partial_bytes(const Transfer& x) const {
        return cfg_.upload_rate * double(now_ - x.start_ns) / kNsPerSecond;
    }

    std::uint32_t alloc_xfer() {
        if (!xfer_free_.empty()) {
            std::uint32_t id = xfer_free_.back();
            xfer_free_.pop_back();
            return id;
        }
        xfers_.emplace_back();
        return std::uint32_t(xfers_.size() - 1);
    }

    void free_xfer(std::uint32_t id) {
        xfers_[id].state = XferState::Free;
        ++xfers_[id].gen;
        xfer_free_.push_back(id);
    }

    std::uint32_t alloc_job() {
        if (!job_free_.empty()) {
            std::uint32_t id = job_free_.back();
            job_free_.pop_back();
            return id;
        }
        jobs_.emplace_back();
        return std::uint32_t(jobs_.size() - 1);
    }

    void setup();
    void spawn_node(bool at_start);
    void event_loop();
    void handle_depart(std::uint32_t node);
    void handle_arrive();
    void handle_toggle(std::uint32_t node);
    void handle_xfer_done(std::uint32_t xfer, std::uint32_t gen);
    void handle_repair_fire(std::uint32_t object);
    void handle_sample(bool warmup_marker);
    void detach_node(std::uint32_t node, bool dying);
    void remove_block(std::uint32_t object, std::uint32_t block);
    bool assign(std::uint32_t job);
    void try_unassigned();
    void fill(std::uint32_t job);
    void park(std::uint32_t job, std::uint32_t block, std::uint32_t holder);
    void admit_intents(std::uint32_t node);
    void pump_upload(std::uint32_t node);
    void complete_job(std::uint32_t job);
    void release_job(std::uint32_t job);
    void check_invariants() const;
    SimMetrics summarize();

    static void erase_value(std::vector<std::uint32_t>& v, std::uint32_t x) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (v[i] == x) {
                v[i] = v.back();
                v.pop_back();
                return;
            }
        }
    }
};

void World::setup() {
    cfg_.validate();
    const double a = cfg_.availability;
    n_ = cfg_.code.n > 0
             ? cfg_.code.n
             : blocks_required(cfg_.code.k, a, cfg_.retrieve_target);
    if (cfg_.code.d > n_ - 1)
        throw std::invalid_argument("repair degree d exceeds n-1");
    if (n_ > cfg_.initial_nodes)
        throw std::invalid_argument("block count n exceeds the initial population");

    CodeConfig cc{n_, cfg_.code.k, cfg_.code.d, cfg_.object_size};
    const CodePoint pt = code_point(cfg_.code.kind, cc);
    alpha_ = pt.alpha;
    beta_ = pt.beta;
    gamma_ = pt.gamma;

    lifetime_mean_s_ = cfg_.mean_lifetime_days * kSecondsPerDay;
    const double n_eff = double(cfg_.initial_nodes);
    if (cfg_.object_count > 0) {
        object_total_ = cfg_.object_count;
    } else {
        const double o = cfg_.target_utilization * cfg_.upload_rate * a * n_eff *
                         lifetime_mean_s_ / (gamma_ * n_);
        if (o < 1.0)
            throw no_solution_error("utilization target yields fewer than one object");
        object_total_ = (long long)std::floor(o);
    }
    theoretical_rho_ = gamma_ * n_ * double(object_total_) /
                       (a * n_eff * lifetime_mean_s_ * cfg_.upload_rate);

    end_ns_ = days_to_ns(cfg_.duration_days);
    warmup_ns_ = days_to_ns(cfg_.warmup_days);
    interval_ns_ = hours_to_ns(cfg_.metrics_interval_hours);
    xfer_dur_ns_ = std::llround(beta_ / cfg_.upload_rate * kNsPerSecond);
    repair_period_ns_ = days_to_ns(cfg_.mean_lifetime_days / n_);
    on_mean_s_ = cfg_.base_time_hours * a * kSecondsPerHour;
    off_mean_s_ = cfg_.base_time_hours * (1.0 - a) * kSecondsPerHour;
    sessions_ = !cfg_.always_online && a < 1.0;
    arrival_mean_s_ = lifetime_mean_s_ / n_eff;

    nodes_.reserve(std::size_t(
        cfg_.initial_nodes * (1.0 + 3.0 * cfg_.duration_days / cfg_.mean_lifetime_days)));
    for (int i = 0; i < cfg_.initial_nodes; ++i) spawn_node(true);

    // Round-robin placement of n distinct holders per object.
    objects_.resize(std::size_t(object_total_));
    int cursor = 0;
    for (auto& obj : objects_) {
        obj.live.reserve(std::size_t(n_) + 8);
        for (int b = 0; b < n_; ++b) {
            const std::uint32_t holder = std::uint32_t(cursor);
            cursor = (cursor + 1) % cfg_.initial_nodes;
            obj.live.push_back({obj.next_block, holder});
            nodes_[holder].blocks.push_back({std::uint32_t(&obj - objects_.data()), obj.next_block});
            ++obj.next_block;
        }
    }
    // Stagger the proactive repair cadence across objects.
    for (std::uint32_t o = 0; o < objects_.size(); ++o)
        schedule(std::llround(uniform() * double(repair_period_ns_)), kEvRepairFire, o);

    if (!cfg_.immortal_nodes)
        schedule(std::llround(exponential(arrival_mean_s_) * kNsPerSecond), kEvArrive);
    schedule(warmup_ns_, kEvSample, 0, 0);
}

void World::spawn_node(bool at_start) {
    const std::uint32_t id = std::uint32_t(nodes_.size());
    nodes_.emplace_back();
    Node& nd = nodes_[id];
    nd.alive = true;
    ++nodes_alive_;
    if (!cfg_.immortal_nodes) {
        const double life_s = exponential(lifetime_mean_s_);
        lifetime_drawn_sum_days_ += life_s / kSecondsPerDay;
        ++lifetime_drawn_count_;
        nd.death_ns = now_ + std::llround(life_s * kNsPerSecond);
        schedule(nd.death_ns, kEvDepart, id);
    }
    // Nodes present at t=0 start in a Bernoulli(a) state; later arrivals join
    // on-line with a fresh on-session.
    nd.online = at_start && sessions_ ? (uniform() < cfg_.availability) : true;
    if (nd.online) ++nodes_online_;
    if (sessions_) {
        const double mean = nd.online ? on_mean_s_ : off_mean_s_;
        schedule(now_ + std::llround(exponential(mean) * kNsPerSecond), kEvToggle, id);
    }
}

void World::event_loop() {
    while (!queue_.empty()) {
        const Event e = queue_.top();
        if (e.t > end_ns_) break;
        queue_.pop();
        const double dt = double(e.t - last_t_);
        online_integral_ += double(nodes_online_) * dt;
        alive_integral_ += double(nodes_alive_) * dt;
        last_t_ = e.t;
        now_ = e.t;
        switch (e.kind) {
            case kEvDepart: handle_depart(e.a); break;
            case kEvArrive: handle_arrive(); break;
            case kEvToggle: handle_toggle(e.a); break;
            case kEvXferDone: handle_xfer_done(e.a, std::uint32_t(e.b)); break;
            case kEvRepairFire: handle_repair_fire(e.a); break;
            case kEvSample: handle_sample(e.b == 0); break;
        }
        if (cfg_.check_invariants) check_invariants();
    }
    const double dt = double(end_ns_ - last_t_);
    online_integral_ += double(nodes_online_) * dt;
    alive_integral_ += double(nodes_alive_) * dt;
    last_t_ = end_ns_;
    now_ = end_ns_;
}

void World::handle_depart(std::uint32_t id) {
    Node& nd = nodes_[id];
    if (!nd.alive) return;
    if (nd.online) --nodes_online_;
    nd.alive = false;
    nd.online = false;
    --nodes_alive_;
    detach_node(id, true);
    for (const auto& [obj, blk] : nd.blocks) remove_block(obj, blk);
    nd.blocks.clear();
    nd.blocks.shrink_to_fit();
    nd.notify.clear();
}

void World::handle_arrive() {
    spawn_node(false);
    try_unassigned();
    schedule(now_ + std::llround(exponential(arrival_mean_s_) * kNsPerSecond), kEvArrive);
}

void World::handle_toggle(std::uint32_t id) {
    Node& nd = nodes_[id];
    if (!nd.alive) return;
    if (nd.online) {
        --nodes_online_;
        nd.online = false;
        detach_node(id, false);
        schedule(now_ + std::llround(exponential(off_mean_s_) * kNsPerSecond), kEvToggle, id);
    } else {
        nd.online = true;
        ++nodes_online_;
        // Wake repairs that were waiting for blocks stored here.
        auto waiting = std::move(nd.notify);
        nd.notify.clear();
        for (const auto& [jid, epoch] : waiting) {
            Job& j = jobs_[jid];
            if (!j.in_use || j.epoch != epoch || !j.assigned) continue;
            std::size_t w = 0;
            for (std::size_t i = 0; i < j.parked.size(); ++i) {
                if (j.parked[i].holder == id)
                    j.retry.push_back(j.parked[i]);
                else
                    j.parked[w++] = j.parked[i];
            }
            j.parked.resize(w);
            fill(jid);
        }
        try_unassigned();
        schedule(now_ + std::llround(exponential(on_mean_s_) * kNsPerSecond), kEvToggle, id);
    }
}

// Tear down everything attached to a node that just went off-line or died:
// restart its repair jobs and abort the uploads it was serving.
void World::detach_node(std::uint32_t id, bool dying) {
    Node& nd = nodes_[id];

    // Jobs repaired here lose all progress.
    struct SrcRelease {
        std::uint32_t src;
        bool was_active;
    };
    std::vector<SrcRelease> releases;
    releases.reserve(nd.down_held.size());
    for (std::uint32_t xid : nd.down_held) {
        Transfer& x = xfers_[xid];
        if (x.state == XferState::Active) {
            const double part = partial_bytes(x);
            wasted_ += part;
            uploaded_ += part;
            releases.push_back({x.src, true});
        } else {
            releases.push_back({x.src, false});
        }
        free_xfer(xid);
    }
    nd.down_held.clear();
    nd.active_down = 0;
    nd.intent_q.clear();
    auto restarting = std::move(nd.jobs);
    nd.jobs.clear();
    for (std::uint32_t jid : restarting) {
        Job& j = jobs_[jid];
        wasted_ += j.bytes;
        j.bytes = 0;
        j.done = 0;
        j.outstanding = 0;
        j.cursor = 0;
        j.retry.clear();
        j.parked.clear();
        ++j.restarts;
        ++restarts_total_;
        ++j.epoch;
        j.assigned = false;
    }
    for (const auto& r : releases) {
        if (r.was_active) {
            Node& src = nodes_[r.src];
            --src.active_up;
            // the transfer is already dead; drop it from the active list
            for (std::size_t i = 0; i < src.up_active.size(); ++i) {
                if (xfers_[src.up_active[i]].state == XferState::Free &&
                    xfers_[src.up_active[i]].dst == id) {
                    src.up_active[i] = src.up_active.back();
                    src.up_active.pop_back();
                    break;
                }
            }
            pump_upload(r.src);
        }
    }

    // Uploads this node was serving for other repairers.
    auto active_uploads = std::move(nd.up_active);
    nd.up_active.clear();
    nd.active_up = 0;
    for (std::uint32_t xid : active_uploads) {
        Transfer& x = xfers_[xid];
        if (x.state != XferState::Active) continue;
        const double part = partial_bytes(x);
        wasted_ += part;
        uploaded_ += part;
        Node& dst = nodes_[x.dst];
        --dst.active_down;
        erase_value(dst.down_held, xid);
        Job& j = jobs_[x.job];
        const bool live_job = j.in_use && j.epoch == x.jepoch;
        const std::uint32_t block = x.block;
        const std::uint32_t jid = x.job;
        free_xfer(xid);
        admit_intents(x.dst);
        if (live_job) {
            --j.outstanding;
            if (!dying) park(jid, block, id);
            fill(jid);
        }
    }
    for (const QueuedXfer& q : nd.up_q) {
        Transfer& x = xfers_[q.xfer];
        if (x.gen != q.gen || x.state != XferState::WaitUpload) continue;
        Node& dst = nodes_[x.dst];
        --dst.active_down;
        erase_value(dst.down_held, q.xfer);
        Job& j = jobs_[x.job];
        const bool live_job = j.in_use && j.epoch == x.jepoch;
        const std::uint32_t block = x.block;
        const std::uint32_t jid = x.job;
        free_xfer(q.xfer);
        admit_intents(x.dst);
        if (live_job) {
            --j.outstanding;
            if (!dying) park(jid, block, id);
            fill(jid);
        }
    }
    nd.up_q.clear();

    // Finally find new homes for the restarted jobs.
    for (std::uint32_t jid : restarting) assign(jid);
}

void World::remove_block(std::uint32_t oid, std::uint32_t block) {
    Object& obj = objects_[oid];
    for (std::size_t i = 0; i < obj.live.size(); ++i) {
        if (obj.live[i].block_id != block) continue;
        obj.live.erase(obj.live.begin() + std::ptrdiff_t(i));
        for (std::uint32_t jid : obj.jobs) {
            Job& j = jobs_[jid];
            if (j.cursor > i) --j.cursor;
        }
        if ((long long)obj.live.size() == cfg_.code.k - 1) ++below_k_;
        return;
    }
}

bool World::assign(std::uint32_t jid) {
    Job& j = jobs_[jid];
    const Object& obj = objects_[j.object];
    const std::uint64_t tag = ++stamp_;
    for (const BlockRef& br : obj.live) nodes_[br.holder].scratch = tag;
    for (std::uint32_t other : obj.jobs)
        if (jobs_[other].assigned) nodes_[jobs_[other].repairer].scratch = tag;
    std::uint32_t best = ~0u;
    std::size_t best_load = ~std::size_t(0);
    for (std::uint32_t id = 0; id < nodes_.size(); ++id) {
        const Node& nd = nodes_[id];
        if (!nd.alive || !nd.online || nd.scratch == tag) continue;
        // A repairer only takes new work while it has an idle download slot;
        // nodes whose slots are all busy are skipped so active jobs spread
        // across the population instead of serializing behind one node.
        if (nd.active_down >= cfg_.max_concurrent_downloads) continue;
        const std::size_t load = nd.blocks.size() + nd.jobs.size();
        if (load < best_load) {
            best_load = load;
            best = id;
        }
    }
    if (best == ~0u) {
        unassigned_.emplace_back(jid, j.epoch);
        return false;
    }
    j.repairer = best;
    j.assigned = true;
    nodes_[best].jobs.push_back(jid);
    fill(jid);
    return true;
}

void World::try_unassigned() {
    if (unassigned_.empty()) return;
    auto pending = std::move(unassigned_);
    unassigned_.clear();
    // When every repairer is at capacity each attempt is a full node scan
    // that cannot succeed; a few consecutive misses means the queue should
    // wait for the next slot to free rather than rescan per pending job.
    int misses = 0;
    std::size_t i = 0;
    for (; i < pending.size(); ++i) {
        const auto& [jid, epoch] = pending[i];
        Job& j = jobs_[jid];
        if (!j.in_use || j.epoch != epoch || j.assigned) continue;
        if (assign(jid)) {
            misses = 0;
        } else if (++misses >= 3) {
            ++i;
            break;
        }
    }
    for (; i < pending.size(); ++i) unassigned_.push_back(pending[i]);
}

void World::park(std::uint32_t jid, std::uint32_t block, std::uint32_t holder) {
    Job& j = jobs_[jid];
    j.parked.push_back({block, holder});
    nodes_[holder].notify.emplace_back(jid, j.epoch);
}

// Keep requesting blocks until d are done or in flight, or no candidate
// holder is on-line. Blocks with off-line holders are parked and revived by
// the holder's next toggle-on.
void World::fill(std::uint32_t jid) {
    Job& j = jobs_[jid];
    if (!j.assigned) return;
    Object& obj = objects_[j.object];
    while (j.outstanding + j.done < cfg_.code.d) {
        bool found = false;
        std::uint32_t block = 0, holder = 0;
        while (!j.retry.empty()) {
            const ParkedBlock pb = j.retry.back();
            j.retry.pop_back();
            const Node& h = nodes_[pb.holder];
            if (!h.alive) continue;  // block is gone
            if (!h.online) {
                park(jid, pb.block, pb.holder);
                continue;
            }
            block = pb.block;
            holder = pb.holder;
            found = true;
            break;
        }
        while (!found && j.cursor < obj.live.size()) {
            const BlockRef br = obj.live[j.cursor];
            ++j.cursor;
            if (br.holder == j.repairer) continue;
            if (!nodes_[br.holder].online) {
                park(jid, br.block_id, br.holder);
                continue;
            }
            block = br.block_id;
            holder = br.holder;
            found = true;
        }
        if (!found) break;
        ++j.outstanding;
        nodes_[j.repairer].intent_q.push_back({jid, j.epoch, block, holder});
    }
    admit_intents(j.repairer);
}

void World::admit_intents(std::uint32_t id) {
    Node& nd = nodes_[id];
    if (!nd.online) return;
    std::vector<std::uint32_t> refill;
    while (nd.active_down < cfg_.max_concurrent_downloads && !nd.intent_q.empty()) {
        const Intent it = nd.intent_q.front();
        nd.intent_q.pop_front();
        Job& j = jobs_[it.job];
        if (!j.in_use || j.epoch != it.epoch || !j.assigned || j.repairer != id) continue;
        const Node& h = nodes_[it.holder];
        if (!h.alive || !h.online) {
            // The holder went away between request and admission.
            --j.outstanding;
            if (h.alive) park(it.job, it.block, it.holder);
            refill.push_back(it.job);
            continue;
        }
        const std::uint32_t xid = alloc_xfer();
        Transfer& x = xfers_[xid];
        x.job = it.job;
        x.jepoch = it.epoch;
        x.block = it.block;
        x.src = it.holder;
        x.dst = id;
        x.state = XferState::WaitUpload;
        ++nd.active_down;
        nd.down_held.push_back(xid);
        nodes_[it.holder].up_q.push_back({xid, x.gen});
        pump_upload(it.holder);
    }
    for (std::uint32_t jid : refill)
        if (jobs_[jid].in_use) fill(jid);
}

void World::pump_upload(std::uint32_t id) {
    Node& nd = nodes_[id];
    while (nd.active_up < cfg_.max_concurrent_uploads && !nd.up_q.empty()) {
        const QueuedXfer q = nd.up_q.front();
        nd.up_q.pop_front();
        Transfer& x = xfers_[q.xfer];
        if (x.gen != q.gen || x.state != XferState::WaitUpload) continue;
        x.state = XferState::Active;
        x.start_ns = now_;
        ++nd.active_up;
        nd.up_active.push_back(q.xfer);
        schedule(now_ + xfer_dur_ns_, kEvXferDone, q.xfer, x.gen);
    }
}

void World::handle_xfer_done(std::uint32_t xid, std::uint32_t gen) {
    Transfer& x = xfers_[xid];
    if (x.gen != gen || x.state != XferState::Active) return;
    uploaded_ += beta_;
    Node& src = nodes_[x.src];
    --src.active_up;
    erase_value(src.up_active, xid);
    Node& dst = nodes_[x.dst];
    --dst.active_down;
    erase_value(dst.down_held, xid);
    const std::uint32_t jid = x.job;
    free_xfer(xid);
    pump_upload(x.src);
    admit_intents(x.dst);
    Job& j = jobs_[jid];
    j.bytes += beta_;
    ++j.done;
    --j.outstanding;
    if (j.done == cfg_.code.d)
        complete_job(jid);
    else
        fill(jid);
}

void World::handle_repair_fire(std::uint32_t oid) {
    schedule(now_ + repair_period_ns_, kEvRepairFire, oid);
    Object& obj = objects_[oid];
    if ((long long)obj.live.size() < cfg_.code.k) ++loss_events_;
    const std::uint32_t jid = alloc_job();
    Job& j = jobs_[jid];
    j.object = oid;
    j.scheduled_ns = now_;
    j.restarts = 0;
    j.done = 0;
    j.outstanding = 0;
    j.bytes = 0;
    j.cursor = 0;
    j.retry.clear();
    j.parked.clear();
    j.assigned = false;
    j.in_use = true;
    obj.jobs.push_back(jid);
    assign(jid);
}

void World::complete_job(std::uint32_t jid) {
    Job& j = jobs_[jid];
    useful_ += gamma_;
    ++completed_total_;
    if (now_ >= warmup_ns_)
        durations_s_.push_back(double(now_ - j.scheduled_ns) / kNsPerSecond);
    Object& obj = objects_[j.object];
    const std::uint32_t block = obj.next_block++;
    obj.live.push_back({block, j.repairer});
    nodes_[j.repairer].blocks.push_back({j.object, block});
    if ((long long)obj.live.size() == cfg_.code.k) --below_k_;
    release_job(jid);
    try_unassigned();  // a repair slot just freed up
    // A fresh block may unblock sibling repairs of the same object.
    for (std::uint32_t other : obj.jobs) {
        Job& oj = jobs_[other];
        if (oj.assigned && oj.outstanding + oj.done < cfg_.code.d) fill(other);
    }
}

void World::release_job(std::uint32_t jid) {
    Job& j = jobs_[jid];
    Object& obj = objects_[j.object];
    erase_value(obj.jobs, jid);
    erase_value(nodes_[j.repairer].jobs, jid);
    j.in_use = false;
    j.assigned = false;
    ++j.epoch;
    j.retry.clear();
    j.parked.clear();
    job_free_.push_back(jid);
}

void World::handle_sample(bool warmup_marker) {
    if (warmup_marker) {
        warm_ = Snapshot{useful_, wasted_,        restarts_total_, completed_total_,
                         loss_events_, durations_s_.size(), online_integral_, alive_integral_};
        tick_ = warm_;
        if (now_ + interval_ns_ <= end_ns_) schedule(now_ + interval_ns_, kEvSample, 0, 1);
        return;
    }
    const double du = useful_ - tick_.useful;
    const double dw = wasted_ - tick_.wasted;
    const double window_s = double(interval_ns_) / kNsPerSecond;
    TimePoint tp;
    tp.t_days = double(now_) / kNsPerSecond / kSecondsPerDay;
    tp.rho_hat = (du + dw) / (cfg_.availability * cfg_.initial_nodes *
                              cfg_.upload_rate * window_s);
    const std::size_t lo = tick_.durations;
    const std::size_t hi = durations_s_.size();
    if (hi > lo) {
        std::vector<double> window(durations_s_.begin() + std::ptrdiff_t(lo),
                                   durations_s_.begin() + std::ptrdiff_t(hi));
        std::sort(window.begin(), window.end());
        double sum = 0;
        for (double v : window) sum += v;
        tp.mean_repair_s = sum / double(window.size());
        tp.p95_repair_s = window[std::size_t(std::ceil(0.95 * double(window.size()))) - 1];
    }
    tp.wasted_frac = (du + dw) > 0 ? dw / (du + dw) : 0.0;
    tp.nodes_online = nodes_online_;
    tp.objects_below_k = below_k_;
    series_.push_back(tp);
    tick_ = Snapshot{useful_, wasted_,        restarts_total_, completed_total_,
                     loss_events_, durations_s_.size(), online_integral_, alive_integral_};
    if (now_ + interval_ns_ <= end_ns_) schedule(now_ + interval_ns_, kEvSample, 0, 1);
}

void World::check_invariants() const {
    for (std::uint32_t id = 0; id < nodes_.size(); ++id) {
        const Node& nd = nodes_[id];
        if (nd.active_up > cfg_.max_concurrent_uploads ||
            nd.active_down > cfg_.max_concurrent_downloads)
            throw std::logic_error("transfer slot cap violated");
        if (!nd.online && (nd.active_up != 0 || nd.active_down != 0 || !nd.jobs.empty()))
            throw std::logic_error("off-line node with active transfers or jobs");
    }
    // Every credited byte is either finished work (useful/wasted) or sits in
    // a live job; in-flight transfer bytes are credited only on completion or
    // abort, so they do not appear on either side.
    double job_bytes = 0;
    for (const Job& j : jobs_)
        if (j.in_use) job_bytes += j.bytes;
    const double accounted = useful_ + wasted_ + job_bytes;
    if (std::abs(accounted - uploaded_) > 1.0 + 1e-6 * uploaded_)
        throw std::logic_error("byte conservation violated");
    for (const Object& obj : objects_) {
        std::vector<std::uint32_t> holders;
        holders.reserve(obj.live.size());
        for (const BlockRef& br : obj.live) holders.push_back(br.holder);
        std::sort(holders.begin(), holders.end());
        if (std::adjacent_find(holders.begin(), holders.end()) != holders.end())
            throw std::logic_error("node holds two blocks of one object");
    }
}

SimMetrics World::summarize() {
    SimMetrics m;
    const double window_s = double(end_ns_ - warmup_ns_) / kNsPerSecond;
    const double du = useful_ - warm_.useful;
    const double dw = wasted_ - warm_.wasted;
    m.measured_utilization = (du + dw) / (cfg_.availability * cfg_.initial_nodes *
                                          cfg_.upload_rate * window_s);
    m.useful_bytes = du;
    m.wasted_bytes = dw;
    m.failed_restarts = restarts_total_ - warm_.restarts;
    m.completed_repairs = completed_total_ - warm_.completed;
    m.loss_events = loss_events_ - warm_.losses;
    m.objects_below_k = below_k_;
    if (!durations_s_.empty()) {
        std::vector<double> sorted = durations_s_;
        std::sort(sorted.begin(), sorted.end());
        double sum = 0;
        for (double v : sorted) sum += v;
        m.repair_time_stats.count = (long long)sorted.size();
        m.repair_time_stats.mean_s = sum / double(sorted.size());
        m.repair_time_stats.median_s = sorted[sorted.size() / 2];
        m.repair_time_stats.p95_s =
            sorted[std::size_t(std::ceil(0.95 * double(sorted.size()))) - 1];
    }
    long long blocks_min = 0, blocks_max = 0;
    double blocks_sum = 0;
    for (std::size_t i = 0; i < objects_.size(); ++i) {
        const long long c = (long long)objects_[i].live.size();
        blocks_sum += double(c);
        if (i == 0 || c < blocks_min) blocks_min = c;
        if (i == 0 || c > blocks_max) blocks_max = c;
    }
    m.blocks_per_object_mean = objects_.empty() ? 0.0 : blocks_sum / double(objects_.size());
    m.blocks_per_object_min = blocks_min;
    m.blocks_per_object_max = blocks_max;
    m.disk_bytes_total = blocks_sum * alpha_;
    const double alive_w = alive_integral_ - warm_.alive_integral;
    const double online_w = online_integral_ - warm_.online_integral;
    m.measured_availability = alive_w > 0 ? online_w / alive_w : 0.0;
    m.mean_population = alive_w / double(end_ns_ - warmup_ns_);
    m.measured_mean_lifetime_days =
        lifetime_drawn_count_ > 0 ? lifetime_drawn_sum_days_ / double(lifetime_drawn_count_)
                                  : 0.0;
    m.resolved_objects = object_total_;
    m.resolved_n = n_;
    m.theoretical_utilization = theoretical_rho_;
    return m;
}

SimResult World::run() {
    setup();
    event_loop();
    SimResult result;
    result.metrics = summarize();
    result.series = std::move(series_);
    return result;
}

}  // namespace

void SimConfig::validate() const {
    if (initial_nodes < 1) throw std::invalid_argument("initial_nodes must be positive");
    if (!(mean_lifetime_days > 0)) throw std::invalid_argument("mean lifetime must be positive");
    if (!(availability > 0.0 && availability <= 1.0))
        throw std::invalid_argument("availability must be in (0,1]");
    if (!(base_time_hours > 0)) throw std::invalid_argument("base time must be positive");
    if (code.k < 1) throw std::invalid_argument("retrieve degree k must be >= 1");
    if (code.d < code.k) throw std::invalid_argument("repair degree d must be >= k");
    if (code.n <= 0 && !(retrieve_target > 0.0 && retrieve_target < 1.0))
        throw std::invalid_argument("retrieve target must be in (0,1) when n is derived");
    if (!(object_size > 0)) throw std::invalid_argument("object size must be positive");
    if ((object_count > 0) == (target_utilization > 0))
        throw std::invalid_argument(
            "exactly one of object_count and target_utilization must be set");
    if (target_utilization > 0 && !(target_utilization <= 1.0))
        throw std::invalid_argument("target utilization must be in (0,1]");
    if (!(upload_rate > 0)) throw std::invalid_argument("upload rate must be positive");
    if (max_concurrent_uploads < 1 || max_concurrent_downloads < 1)
        throw std::invalid_argument("transfer slot caps must be positive");
    if (!(warmup_days >= 0)) throw std::invalid_argument("warmup must be non-negative");
    if (!(duration_days > warmup_days))
        throw std::invalid_argument("duration must exceed warmup");
    if (!(metrics_interval_hours > 0))
        throw std::invalid_argument("metrics interval must be positive");
}

SimResult run(const SimConfig& config) {
    World world(config);
    return world.run();
}

}  // namespace redplan::sim
