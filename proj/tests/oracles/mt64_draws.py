#!/usr/bin/env python3
# Independent reference for the random stream contract used by testgen:
# MT19937-64 from its published recurrence plus the documented bounded
# rejection draw. Prints the values frozen into test_testgen.cpp.

MASK = (1 << 64) - 1


class MT64:
    NN, MM = 312, 156
    MATRIX_A = 0xB5026F5AA96619E9
    UM, LM = 0xFFFFFFFF80000000, 0x7FFFFFFF

    def __init__(self, seed):
        self.mt = [0] * self.NN
        self.mt[0] = seed & MASK
        for i in range(1, self.NN):
            prev = self.mt[i - 1]
            self.mt[i] = (6364136223846793005 * (prev ^ (prev >> 62)) + i) & MASK
        self.mti = self.NN

    def next(self):
        if self.mti >= self.NN:
            for i in range(self.NN):
                x = (self.mt[i] & self.UM) | (self.mt[(i + 1) % self.NN] & self.LM)
                xa = x >> 1
                if x & 1:
                    xa ^= self.MATRIX_A
                self.mt[i] = self.mt[(i + self.MM) % self.NN] ^ xa
            self.mti = 0
        x = self.mt[self.mti]
        self.mti += 1
        x ^= (x >> 29) & 0x5555555555555555
        x ^= (x << 17) & 0x71D67FFFEDA60000
        x ^= (x << 37) & 0xFFF7EEE000000000
        x ^= x >> 43
        return x & MASK


def draw(rng, lo, hi):
    span = (hi - lo + 1) & MASK
    x = rng.next()
    if span == 0:
        return x
    limit = (1 << 64) - ((1 << 64) % span)
    while x >= limit:
        x = rng.next()
    return lo + x % span


def instance(rng, bounds):
    return [draw(rng, lo, hi) for lo, hi in bounds]


def flow(rng, bounds, length):
    out = []
    for i in range(length):
        inst = instance(rng, bounds)
        if i > 0:
            while inst == out[-1]:
                inst = instance(rng, bounds)
        out.append(inst)
    return out


if __name__ == "__main__":
    r = MT64(5489)
    for _ in range(9999):
        r.next()
    print("mt19937_64 default seed, 10000th output:", r.next())

    web = [(0, 100), (0, 100)]
    print("instance seed 7:", instance(MT64(7), web))
    f = flow(MT64(42), web, 20)
    print("flow seed 42 len 20:", ";".join(",".join(map(str, i)) for i in f))
