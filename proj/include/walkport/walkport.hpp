#pragma once

#include "walkport/bases.hpp"
#include "walkport/coins.hpp"
#include "walkport/common.hpp"
#include "walkport/density.hpp"
#include "walkport/measure.hpp"
#include "walkport/oracle.hpp"
#include "walkport/protocol.hpp"
#include "walkport/secret.hpp"
#include "walkport/security.hpp"
#include "walkport/slots.hpp"
#include "walkport/state.hpp"
#include "walkport/walk.hpp"
