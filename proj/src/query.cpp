#include "iqsched/query.hpp"

#include "iqsched/errors.hpp"

namespace iqsched {

void validateQuery(const Query& q) {
  if (q.id.empty()) throw InvalidModelError("query without id");
  if (q.deadlineUs <= q.profile.startTime())
    throw InvalidModelError("query " + q.id + ": deadline not after stream start");
}

}  // namespace iqsched
