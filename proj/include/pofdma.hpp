#pragma once

#include "pofdma/types.hpp"
#include "pofdma/error.hpp"
#include "pofdma/transforms.hpp"
#include "pofdma/mapping.hpp"
#include "pofdma/txchain.hpp"
#include "pofdma/rng.hpp"
#include "pofdma/channel.hpp"
#include "pofdma/rxchain.hpp"
#include "pofdma/metrics.hpp"
#include "pofdma/complexity.hpp"
