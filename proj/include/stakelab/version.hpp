#pragma once

#define STAKELAB_VERSION "0.1.0"
