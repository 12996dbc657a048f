mod common;

use common::{random_distribution, rng};
use gtdist::distribution::LaplaceMode;
use gtdist::io::{
    decode_modes_json, decode_pfm, decode_pgm, decode_volume, encode_modes_json, encode_pfm, encode_pfm_with_order,
    encode_pgm, encode_volume, read_modes_json, read_pfm, read_pgm, read_volume, write_modes_json, write_pfm,
    write_pgm, write_volume, ModesDocument, PfmByteOrder, PixelModes, MPV_HEADER_LEN,
};
use gtdist::volume::{DisparityMap, EnsembleVolumes, GrayImage, ProbabilityVolume};
use gtdist::GtError;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn random_ensemble(r: &mut ChaCha8Rng, m: usize, h: usize, w: usize, d: usize) -> EnsembleVolumes<f32> {
    let members = (0..m)
        .map(|_| {
            let data: Vec<f32> = (0..h * w)
                .flat_map(|_| {
                    if r.gen_bool(0.1) {
                        vec![0.0; d]
                    } else {
                        random_distribution(r, d).probs().iter().map(|&v| v as f32).collect()
                    }
                })
                .collect();
            ProbabilityVolume::new(h, w, d, data).unwrap()
        })
        .collect();
    EnsembleVolumes::new(members).unwrap()
}

fn random_map(r: &mut ChaCha8Rng, h: usize, w: usize) -> DisparityMap<f32> {
    let values = (0..h * w)
        .map(|_| match r.gen_range(0..10) {
            0 => f32::INFINITY,
            1 => -1.0,
            _ => r.gen_range(0.0f32..200.0),
        })
        .collect();
    DisparityMap::new(h, w, values).unwrap()
}

fn pgm_fixture(r: &mut ChaCha8Rng, maxval: u16) -> Vec<u8> {
    let (w, h) = (r.gen_range(1..20), r.gen_range(1..20));
    let mut data: Vec<f64> = (0..w * h).map(|_| r.gen_range(0..=maxval) as f64 / maxval as f64).collect();
    // A full-scale sample makes a lowered maxval detectable.
    data[0] = 1.0;
    encode_pgm(&GrayImage::new(w, h, data).unwrap(), maxval).unwrap()
}

fn header_len(bytes: &[u8], lines: usize) -> usize {
    let mut seen = 0;
    for (i, &b) in bytes.iter().enumerate() {
        if b == b'\n' {
            seen += 1;
            if seen == lines {
                return i + 1;
            }
        }
    }
    unreachable!("header has {lines} lines")
}

/// Corrupts one header byte to a different value, `trials` times, and
/// checks every result is rejected.
fn fuzz_header<F: Fn(&[u8]) -> bool>(bytes: &[u8], header: usize, trials: usize, seed: u64, rejected: F) -> usize {
    let mut r = rng(seed);
    let mut misses = 0;
    for _ in 0..trials {
        let mut copy = bytes.to_vec();
        let at = r.gen_range(0..header);
        let old = copy[at];
        copy[at] = loop {
            let v: u8 = r.gen();
            if v != old {
                break v;
            }
        };
        if !rejected(&copy) {
            misses += 1;
            eprintln!("corruption at byte {at} ({old:#04x} -> {:#04x}) accepted", copy[at]);
        }
    }
    misses
}

#[test]
fn mpv_round_trip_is_bit_identical() {
    let mut r = rng(1);
    let ens = random_ensemble(&mut r, 2, 4, 4, 8);
    let bytes = encode_volume(&ens).unwrap();
    assert_eq!(bytes.len(), MPV_HEADER_LEN + 2 * 4 * 4 * 8 * 4);
    let back: EnsembleVolumes<f32> = decode_volume(&bytes).unwrap();
    assert_eq!(back, ens);
    assert_eq!(encode_volume(&back).unwrap(), bytes);
    let wide: EnsembleVolumes<f64> = decode_volume(&bytes).unwrap();
    assert_eq!(encode_volume(&wide).unwrap(), bytes);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("v.mpv");
    write_volume(&path, &ens).unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), bytes);
    assert_eq!(read_volume::<f32>(&path).unwrap(), ens);
}

#[test]
fn mpv_errors_name_offsets() {
    let ens = random_ensemble(&mut rng(2), 1, 1, 1, 4);
    let mut bytes = encode_volume(&ens).unwrap();
    let mut bad = bytes.clone();
    bad[0] = b'X';
    assert!(matches!(decode_volume::<f64>(&bad), Err(GtError::Format { offset: 0, .. })));
    bytes.truncate(MPV_HEADER_LEN + 12);
    assert!(matches!(decode_volume::<f64>(&bytes), Err(GtError::Format { .. })));
    let msg = decode_volume::<f64>(&bytes).unwrap_err().to_string();
    assert!(msg.contains("32"), "{msg}");
}

#[test]
fn pfm_round_trip_both_byte_orders() {
    let mut r = rng(3);
    let map = random_map(&mut r, 7, 11);
    for order in [PfmByteOrder::LittleEndian, PfmByteOrder::BigEndian] {
        let bytes = encode_pfm_with_order(&map, order);
        let back: DisparityMap<f32> = decode_pfm(&bytes).unwrap();
        let a: Vec<u32> = map.values().iter().map(|v| v.to_bits()).collect();
        let b: Vec<u32> = back.values().iter().map(|v| v.to_bits()).collect();
        assert_eq!(a, b);
        assert_eq!(back.validity(), map.validity());
        assert_eq!(encode_pfm_with_order(&back, order), bytes);
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.pfm");
    write_pfm(&path, &map).unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), encode_pfm(&map));
    assert_eq!(read_pfm::<f32>(&path).unwrap().validity(), map.validity());
}

#[test]
fn pfm_rows_are_stored_bottom_up() {
    let map = DisparityMap::new(2, 1, vec![1.0f32, 2.0]).unwrap();
    let bytes = encode_pfm(&map);
    let payload = &bytes[bytes.len() - 8..];
    assert_eq!(&payload[..4], &2.0f32.to_le_bytes());
    assert!(matches!(decode_pfm::<f64>(b"PF\n1 1\n-1.0\n\0\0\0\0\0\0\0\0\0\0\0\0"), Err(GtError::UnsupportedFormat(_))));
    let neg: DisparityMap<f64> = decode_pfm(&encode_pfm(&DisparityMap::new(1, 1, vec![-1.0f32]).unwrap())).unwrap();
    assert!(!neg.is_valid(0));
}

#[test]
fn pgm_round_trip_8_and_16_bit() {
    let mut r = rng(4);
    for maxval in [255u16, 1000, 65535] {
        let bytes = pgm_fixture(&mut r, maxval);
        let img: GrayImage<f64> = decode_pgm(&bytes).unwrap();
        assert_eq!(encode_pgm(&img, maxval).unwrap(), bytes);
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("i.pgm");
    let img: GrayImage<f64> = decode_pgm(&pgm_fixture(&mut r, 255)).unwrap();
    write_pgm(&path, &img, 255).unwrap();
    assert_eq!(read_pgm::<f64>(&path).unwrap(), img);
}

#[test]
fn modes_json_round_trip_and_golden() {
    let mut r = rng(5);
    let pixels = (0..20)
        .map(|i| PixelModes {
            y: i / 5,
            x: i % 5,
            noise_count: r.gen_range(0..4),
            label_cluster: if i % 3 == 0 { None } else { Some(0) },
            modes: (0..r.gen_range(0..4))
                .map(|_| LaplaceMode::new(r.gen::<f64>(), r.gen_range(0.0..95.0), r.gen_range(0.0..3.0)))
                .collect(),
        })
        .collect();
    let doc = ModesDocument { height: 4, width: 5, disparities: 96, pixels };
    let text = encode_modes_json(&doc).unwrap();
    assert_eq!(decode_modes_json::<f64>(&text).unwrap(), doc);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    write_modes_json(&path, &doc).unwrap();
    assert_eq!(read_modes_json::<f64>(&path).unwrap(), doc);

    let empty = ModesDocument::<f64> { height: 2, width: 3, disparities: 8, pixels: vec![] };
    assert_eq!(encode_modes_json(&empty).unwrap(), "{\"H\":2,\"W\":3,\"D\":8,\"pixels\":[]}\n");
    let one = ModesDocument {
        height: 1,
        width: 1,
        disparities: 4,
        pixels: vec![PixelModes { y: 0, x: 0, noise_count: 1, label_cluster: Some(0), modes: vec![LaplaceMode::new(1.0, 2.5, 0.8)] }],
    };
    assert_eq!(
        encode_modes_json(&one).unwrap(),
        "{\"H\":1,\"W\":1,\"D\":4,\"pixels\":[\n\
         {\"y\":0,\"x\":0,\"noise_count\":1,\"label_cluster\":0,\"modes\":[{\"w\":1.0000000000000000e0,\"mu\":2.5000000000000000e0,\"b\":8.0000000000000004e-1}]}\n\
         ]}\n"
    );
}

#[test]
fn single_byte_header_corruptions_are_rejected() {
    let mut r = rng(6);
    let mpv = encode_volume(&random_ensemble(&mut r, 2, 3, 5, 6)).unwrap();
    let misses = fuzz_header(&mpv, MPV_HEADER_LEN, 1000, 10, |b| decode_volume::<f32>(b).is_err());
    assert_eq!(misses, 0, "MPV");

    let pfm = encode_pfm(&random_map(&mut r, 9, 13));
    let misses = fuzz_header(&pfm, header_len(&pfm, 3), 1000, 11, |b| decode_pfm::<f32>(b).is_err());
    assert_eq!(misses, 0, "PFM");
    let pfm_be = encode_pfm_with_order(&random_map(&mut r, 4, 6), PfmByteOrder::BigEndian);
    let misses = fuzz_header(&pfm_be, header_len(&pfm_be, 3), 1000, 12, |b| decode_pfm::<f32>(b).is_err());
    assert_eq!(misses, 0, "PFM big-endian");

    for (maxval, seed) in [(255u16, 13), (65535, 14)] {
        let pgm = pgm_fixture(&mut r, maxval);
        let misses = fuzz_header(&pgm, header_len(&pgm, 3), 1000, seed, |b| decode_pgm::<f64>(b).is_err());
        assert_eq!(misses, 0, "PGM maxval {maxval}");
    }
}
