#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>

#include "cmgym/env.hpp"

namespace cmgym {

inline constexpr const char* kProtocolVersion = "cmgym/1";

/// One line-delimited JSON session over an environment.
///
/// Requests carry a strictly increasing integer `id` and a `kind`:
///
///     {"id":1,"kind":"HELLO","protocol":"cmgym/1"}
///     {"id":2,"kind":"RESET","scenario":"cfg.txt","seed":7,"overrides":["fleet_size=10"]}
///     {"id":3,"kind":"STEP","actions":{"0":4,"3":1}}
///     {"id":4,"kind":"CLOSE"}
///
/// Replies echo the id with kind OBS, STEP_RESULT, HELLO, CLOSED or
/// ERROR{code, message}. Observation maps are keyed by decimal agent id.
class ProtocolSession {
public:
    ProtocolSession();
    ~ProtocolSession();

    /// Banner written before the first request.
    std::string banner() const;
    /// Exactly one reply line (without newline) per request line.
    std::string handle(const std::string& line);
    bool closed() const { return closed_; }

private:
    std::unique_ptr<CmEnv> env_;
    std::optional<std::int64_t> last_id_;
    bool closed_ = false;
};

/// Serves requests from `in` until CLOSE or end of input. Returns 0.
int serve(std::istream& in, std::ostream& out);

}  // namespace cmgym
