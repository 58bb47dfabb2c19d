#pragma once

// Builds small legacy pcap captures (Ethernet, IPv4/IPv6, UDP or TCP) for
// the ingestion tests. Checksums are left zero; the reader ignores them.

#include <cbordns/encoding.hpp>

namespace cbordns::test_support {

struct packet_spec {
    bool ipv6 = false;
    std::uint8_t protocol = 17; // 6 = TCP
    bytes src = {192, 0, 2, 1};
    bytes dst = {192, 0, 2, 53};
    std::uint16_t sport = 40000;
    std::uint16_t dport = 53;
    bytes payload;
    bool ipv6_hop_by_hop = false;
    std::uint32_t seconds = 1700000000;
    std::uint32_t micros = 0;
};

class pcap_writer {
public:
    explicit pcap_writer(bool swapped = false, std::uint32_t link_type = 1)
        : swapped_(swapped)
    {
        u32(0xa1b2c3d4);
        u16(2);
        u16(4);
        u32(0);
        u32(0);
        u32(65535);
        u32(link_type);
    }

    void add(const packet_spec& p)
    {
        bytes frame = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
        push16(frame, p.ipv6 ? 0x86dd : 0x0800);

        bytes l4;
        push16(l4, p.sport);
        push16(l4, p.dport);
        if (p.protocol == 17) {
            push16(l4, static_cast<std::uint16_t>(8 + p.payload.size()));
            push16(l4, 0);
        } else {
            bytes tcp(16, 0);
            tcp[8] = 0x50;
            l4.insert(l4.end(), tcp.begin(), tcp.end());
        }
        l4.insert(l4.end(), p.payload.begin(), p.payload.end());

        if (p.ipv6) {
            bytes ext;
            if (p.ipv6_hop_by_hop)
                ext = {p.protocol, 0, 1, 4, 0, 0, 0, 0};
            frame.insert(frame.end(), {0x60, 0, 0, 0});
            push16(frame, static_cast<std::uint16_t>(ext.size() + l4.size()));
            frame.push_back(p.ipv6_hop_by_hop ? 0 : p.protocol);
            frame.push_back(64);
            frame.insert(frame.end(), p.src.begin(), p.src.end());
            frame.insert(frame.end(), p.dst.begin(), p.dst.end());
            frame.insert(frame.end(), ext.begin(), ext.end());
        } else {
            frame.push_back(0x45);
            frame.push_back(0);
            push16(frame, static_cast<std::uint16_t>(20 + l4.size()));
            frame.insert(frame.end(), {0, 0, 0x40, 0, 64, p.protocol, 0, 0});
            frame.insert(frame.end(), p.src.begin(), p.src.end());
            frame.insert(frame.end(), p.dst.begin(), p.dst.end());
        }
        frame.insert(frame.end(), l4.begin(), l4.end());

        u32(p.seconds);
        u32(p.micros);
        u32(static_cast<std::uint32_t>(frame.size()));
        u32(static_cast<std::uint32_t>(frame.size()));
        data_.insert(data_.end(), frame.begin(), frame.end());
    }

    const bytes& data() const { return data_; }

private:
    static void push16(bytes& out, std::uint16_t v)
    {
        out.push_back(static_cast<std::uint8_t>(v >> 8));
        out.push_back(static_cast<std::uint8_t>(v));
    }

    void u16(std::uint16_t v)
    {
        if (swapped_)
            push16(data_, v);
        else
            data_.insert(data_.end(), {static_cast<std::uint8_t>(v), static_cast<std::uint8_t>(v >> 8)});
    }

    void u32(std::uint32_t v)
    {
        for (int i = 0; i < 4; ++i) {
            int shift = swapped_ ? 24 - 8 * i : 8 * i;
            data_.push_back(static_cast<std::uint8_t>(v >> shift));
        }
    }

    bool swapped_;
    bytes data_;
};

} // namespace cbordns::test_support
